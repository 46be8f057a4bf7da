//! Autoregressive band-row generator: an MLP-GRU-MLP network that emits one
//! [`TrainSequence`](crate::TrainSequence) row per node, trained by teacher
//! forcing with hand-written gradients.

mod checkpoint;
mod data;
mod infer;
mod network;
mod optim;
mod params;
mod search;
mod train;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::OrderingFamily;
use crate::ordering::{OrderingConfig, TieBreak};

pub use checkpoint::{Checkpoint, TensorRecord};
pub use data::{estimate_row_width, estimate_row_width_with, fit_sequence, Batch, BASELINE_BFS_SAMPLES, MAX_ORDERING_ATTEMPTS};
pub use infer::{
    log_likelihood, reconstruction_auprc, sample, sample_one, select_temperature, teacher_forced_probs,
    TemperatureTrial,
};
pub use network::{gradient_check, loss_bce, loss_bce_grad, Forward, GradCheck, NormMode, GRAD_CHECK_FLOOR};
pub use optim::{cosine_lr, AdamW};
pub use params::{BatchNorm, GruLayer, Linear, ModelParams, Named};
pub use search::{hyperopt, random_search, Objective, SearchResult, SearchSpace, Trial};
pub use train::{train, EpochRecord, History};

/// Row width layout: BwR sizes rows by the Cuthill-McKee bandwidth, the
/// baseline by a high percentile of random-BFS bandwidths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Bwr,
    Baseline,
}

impl Mode {
    /// Ordering used for training sequences.
    pub fn ordering(self, seed: u64) -> OrderingConfig {
        let family = match self {
            Mode::Bwr => OrderingFamily::Cm,
            Mode::Baseline => OrderingFamily::Bfs,
        };
        OrderingConfig { family, seed, tie_break: TieBreak::Random }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Bwr => "bwr",
            Mode::Baseline => "baseline",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bwr" => Ok(Mode::Bwr),
            "baseline" => Ok(Mode::Baseline),
            other => Err(Error::Input(format!("unknown mode `{other}` (expected bwr or baseline)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub mode: Mode,
    /// Columns per row including the indicator. `None` means estimate from
    /// the training graphs.
    pub row_width: Option<usize>,
    pub hidden: usize,
    pub gru_layers: usize,
    pub mlp_hidden: usize,
    pub lr: f64,
    pub weight_decay: f64,
    pub epochs: usize,
    pub batches_per_epoch: usize,
    pub val_batches: usize,
    pub batch_size: usize,
    pub temperature: f64,
    pub max_nodes: usize,
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            mode: Mode::Bwr,
            row_width: None,
            hidden: 128,
            gru_layers: 4,
            mlp_hidden: 128,
            lr: 1e-3,
            weight_decay: 1e-3,
            epochs: 100,
            batches_per_epoch: 30,
            val_batches: 9,
            batch_size: 32,
            temperature: 1.0,
            max_nodes: 512,
            seed: 0,
        }
    }
}

impl ModelConfig {
    /// Small network for laptop-scale runs.
    pub fn desk() -> Self {
        ModelConfig { hidden: 32, gru_layers: 1, mlp_hidden: 32, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(d) = self.row_width {
            if d < 2 {
                return Err(Error::Input(format!("row_width must be at least 2, got {d}")));
            }
        }
        if self.temperature.is_nan() || self.temperature <= 0.0 {
            return Err(Error::Input(format!("temperature must be positive, got {}", self.temperature)));
        }
        for (name, v) in [
            ("hidden", self.hidden),
            ("gru_layers", self.gru_layers),
            ("mlp_hidden", self.mlp_hidden),
            ("batch_size", self.batch_size),
            ("max_nodes", self.max_nodes),
        ] {
            if v == 0 {
                return Err(Error::Input(format!("{name} must be positive")));
            }
        }
        if [self.lr, self.weight_decay].iter().any(|x| x.is_nan() || *x < 0.0) {
            return Err(Error::Input("lr and weight_decay must be non-negative".into()));
        }
        Ok(())
    }

    /// Resolved row width; errors if it has not been set.
    pub fn width(&self) -> Result<usize> {
        self.row_width
            .ok_or_else(|| Error::Input("row_width is not set; estimate it from training data first".into()))
    }
}
