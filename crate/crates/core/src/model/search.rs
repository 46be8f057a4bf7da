//! Random hyperparameter search over learning rate and weight decay.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::infer::{reconstruction_auprc, sample};
use super::params::ModelParams;
use super::train::train;
use super::ModelConfig;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metrics::{extract_stats, mmd_suite, MMDReport, MetricConfig};
use crate::ordering::OrderingConfig;
use crate::rng::{self, derive_seed};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchSpace {
    pub lr: (f64, f64),
    pub weight_decay: (f64, f64),
}

impl Default for SearchSpace {
    fn default() -> Self {
        SearchSpace { lr: (1e-4, 1e-2), weight_decay: (1e-5, 1e-1) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Validation mean MMD².
    Mmd,
    /// Validation mean MMD² minus teacher-forced AUPRC.
    MmdMinusAuprc,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Mmd => "mmd",
            Objective::MmdMinusAuprc => "mmd_minus_auprc",
        })
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mmd" => Ok(Objective::Mmd),
            "mmd_minus_auprc" | "mmd-auprc" => Ok(Objective::MmdMinusAuprc),
            other => Err(Error::Input(format!("unknown objective `{other}` (expected mmd or mmd_minus_auprc)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub index: usize,
    pub lr: f64,
    pub weight_decay: f64,
    pub objective: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mmd: Option<MMDReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub auprc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    /// Index into `trials` of the lowest objective (first on ties).
    pub best: usize,
    pub trials: Vec<Trial>,
}

impl SearchResult {
    pub fn best_trial(&self) -> &Trial {
        &self.trials[self.best]
    }
}

fn log_uniform(rng: &mut rng::Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo >= hi {
        return lo;
    }
    rng.random_range(lo.ln()..hi.ln()).exp()
}

/// Draws `trials` log-uniform `(lr, weight_decay)` pairs and scores each with
/// `objective`, which returns the value to minimize plus optional metrics.
pub fn random_search<F>(space: &SearchSpace, trials: usize, seed: u64, mut objective: F) -> Result<SearchResult>
where
    F: FnMut(usize, f64, f64) -> Result<(f64, Option<MMDReport>, Option<f64>)>,
{
    if trials == 0 {
        return Err(Error::Input("random search needs at least one trial".into()));
    }
    if space.lr.0 <= 0.0 || space.weight_decay.0 <= 0.0 {
        return Err(Error::Input("log-uniform ranges must be positive".into()));
    }
    let mut rng = rng::seeded(seed);
    let draws: Vec<(f64, f64)> =
        (0..trials).map(|_| (log_uniform(&mut rng, space.lr), log_uniform(&mut rng, space.weight_decay))).collect();
    let mut out = Vec::with_capacity(trials);
    for (index, (lr, weight_decay)) in draws.into_iter().enumerate() {
        let (value, mmd, auprc) = objective(index, lr, weight_decay)?;
        out.push(Trial { index, lr, weight_decay, objective: value, mmd, auprc });
    }
    let best = out
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.objective.total_cmp(&b.1.objective).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .expect("at least one trial");
    Ok(SearchResult { best, trials: out })
}

/// Trains one model per trial and scores it on `val`: samples as many graphs
/// as `val` holds and computes mean MMD², optionally minus AUPRC.
#[allow(clippy::too_many_arguments)]
pub fn hyperopt(
    cfg: &ModelConfig,
    train_graphs: &[Graph],
    val: &[Graph],
    ord: &OrderingConfig,
    space: &SearchSpace,
    trials: usize,
    objective: Objective,
    metrics: &MetricConfig,
    workers: usize,
) -> Result<SearchResult> {
    if val.is_empty() {
        return Err(Error::Input("hyperparameter search needs validation graphs".into()));
    }
    let val_stats = extract_stats(val, &metrics.stats(), workers)?;
    random_search(space, trials, cfg.seed, |i, lr, weight_decay| {
        let c = ModelConfig { lr, weight_decay, ..cfg.clone() };
        let (params, _) = train(ModelParams::for_config(&c)?, &c, train_graphs, val, ord)?;
        let samples = sample(&params, &c, val.len(), derive_seed(cfg.seed, i as u64), workers)?;
        let mmd = mmd_suite(&extract_stats(&samples, &metrics.stats(), workers)?, &val_stats, &metrics.kernels());
        match objective {
            Objective::Mmd => Ok((mmd.mean, Some(mmd), None)),
            Objective::MmdMinusAuprc => {
                let auprc = reconstruction_auprc(&params, val, ord)?;
                Ok((mmd.mean - auprc, Some(mmd), Some(auprc)))
            }
        }
    })
}
