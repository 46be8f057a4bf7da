use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::params::ModelParams;
use super::train::History;
use super::ModelConfig;
use crate::error::{Error, Result};
use crate::ordering::OrderingConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorRecord {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

/// Everything needed to resume sampling or evaluation from a trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub config: ModelConfig,
    pub ordering: OrderingConfig,
    pub row_width: usize,
    pub tensors: Vec<TensorRecord>,
    pub norm_stats: Vec<TensorRecord>,
    pub history: History,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
}

impl Checkpoint {
    pub fn new(params: &ModelParams, config: &ModelConfig, ordering: &OrderingConfig, history: History) -> Self {
        let tensors = params
            .named()
            .into_iter()
            .map(|t| TensorRecord { name: t.name, shape: t.shape, data: t.data.to_vec() })
            .collect();
        let norm_stats = params
            .norm_stats()
            .into_iter()
            .map(|(name, data)| TensorRecord { name, shape: vec![data.len()], data: data.to_vec() })
            .collect();
        Checkpoint {
            config: ModelConfig { row_width: Some(params.row_width()), ..config.clone() },
            ordering: *ordering,
            row_width: params.row_width(),
            tensors,
            norm_stats,
            history,
            config_hash: None,
        }
    }

    /// Rebuilds the parameters, checking that every tensor is present with
    /// the expected shape and that nothing is left over.
    pub fn params(&self) -> Result<ModelParams> {
        let c = &self.config;
        if self.row_width < 2 {
            return Err(Error::Format(format!("checkpoint row width {} is below 2", self.row_width)));
        }
        let mut p = ModelParams::init(self.row_width, c.mlp_hidden, c.hidden, c.gru_layers, 0);
        let mut by_name: BTreeMap<&str, &TensorRecord> = BTreeMap::new();
        for t in self.tensors.iter().chain(&self.norm_stats) {
            if by_name.insert(&t.name, t).is_some() {
                return Err(Error::Format(format!("duplicate tensor `{}`", t.name)));
            }
        }
        let expected: Vec<(String, Vec<usize>)> = p.named().into_iter().map(|t| (t.name, t.shape)).collect();
        let stats: Vec<(String, usize)> = p.norm_stats().into_iter().map(|(n, d)| (n, d.len())).collect();
        let mut take = |name: &str, shape: &[usize]| -> Result<&TensorRecord> {
            let t = by_name.remove(name).ok_or_else(|| Error::Format(format!("missing tensor `{name}`")))?;
            let len: usize = shape.iter().product();
            if t.shape != shape || t.data.len() != len {
                return Err(Error::Format(format!(
                    "tensor `{name}` has shape {:?} with {} values, expected {shape:?}",
                    t.shape,
                    t.data.len()
                )));
            }
            if t.data.iter().any(|x| !x.is_finite()) {
                return Err(Error::Numeric(format!("tensor `{name}` has non-finite values")));
            }
            Ok(t)
        };
        let mut loaded = Vec::new();
        for (name, shape) in &expected {
            loaded.push(take(name, shape)?);
        }
        let mut loaded_stats = Vec::new();
        for (name, len) in &stats {
            loaded_stats.push(take(name, &[*len])?);
        }
        if let Some(extra) = by_name.keys().next() {
            return Err(Error::Format(format!("unexpected tensor `{extra}`")));
        }
        for (slot, t) in p.slices_mut().into_iter().zip(loaded) {
            slot.copy_from_slice(&t.data);
        }
        for (slot, t) in p.norm_stats_mut().into_iter().zip(loaded_stats) {
            slot.copy_from_slice(&t.data);
        }
        Ok(p)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Numeric(format!("checkpoint not serializable: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("checkpoint: {e}")))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}
