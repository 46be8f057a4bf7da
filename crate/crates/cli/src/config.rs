//! Run configuration: one flat key space shared by flags, the TOML config
//! file and the resolved echo written into every artifact.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use bandgen_core::datasets::DatasetKind;
use bandgen_core::metrics::MetricConfig;
use bandgen_core::model::{ModelConfig, Objective, SearchSpace};
use bandgen_core::{Error, OrderingConfig, OrderingFamily, Result, TieBreak};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const SEED_ENV: &str = "BANDGEN_SEED";

/// Settings that belong to the driver rather than to the model or metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunOptions {
    pub kind: DatasetKind,
    pub count: usize,
    /// Copies of each generated graph; copies get distinct ordering seeds
    /// downstream because every graph index derives its own seed.
    pub replicate: usize,
    /// Train/val/test fractions for `dataset`; empty writes no split files.
    pub split: Vec<f64>,
    /// Share of the training file held out for validation when no separate
    /// validation file is given.
    pub val_fraction: f64,
    pub order: OrderingFamily,
    pub tie_break: TieBreak,
    pub temp_grid: Vec<f64>,
    pub trials: usize,
    pub objective: Objective,
    pub lr_min: f64,
    pub lr_max: f64,
    pub wd_min: f64,
    pub wd_max: f64,
    pub baseline_samples: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        let space = SearchSpace::default();
        RunOptions {
            kind: DatasetKind::Community2,
            count: 100,
            replicate: 1,
            split: Vec::new(),
            val_fraction: 0.2,
            order: OrderingFamily::Cm,
            tie_break: TieBreak::Random,
            temp_grid: Vec::new(),
            trials: 10,
            objective: Objective::Mmd,
            lr_min: space.lr.0,
            lr_max: space.lr.1,
            wd_min: space.weight_decay.0,
            wd_max: space.weight_decay.1,
            baseline_samples: bandgen_core::model::BASELINE_BFS_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub run: RunOptions,
    pub model: ModelConfig,
    pub metrics: MetricConfig,
}

fn to_map<T: Serialize>(t: &T) -> Map<String, Value> {
    match serde_json::to_value(t).expect("config sections serialize") {
        Value::Object(m) => m,
        _ => unreachable!("config sections are structs"),
    }
}

fn from_map<T: DeserializeOwned>(m: Map<String, Value>) -> Result<T> {
    serde_json::from_value(Value::Object(m)).map_err(|e| Error::Format(format!("config: {e}")))
}

impl RunConfig {
    pub fn seed(&self) -> u64 {
        self.model.seed
    }

    pub fn ordering(&self) -> OrderingConfig {
        OrderingConfig { family: self.run.order, seed: self.model.seed, tie_break: self.run.tie_break }
    }

    /// Ordering used by the model in `self.model.mode`, with the configured
    /// tie-break.
    pub fn model_ordering(&self) -> OrderingConfig {
        OrderingConfig { tie_break: self.run.tie_break, ..self.model.mode.ordering(self.model.seed) }
    }

    pub fn search_space(&self) -> SearchSpace {
        SearchSpace { lr: (self.run.lr_min, self.run.lr_max), weight_decay: (self.run.wd_min, self.run.wd_max) }
    }

    /// Every key with its resolved value, in key order.
    pub fn flat(&self) -> BTreeMap<String, Value> {
        let mut out = BTreeMap::new();
        for m in [to_map(&self.run), to_map(&self.model), to_map(&self.metrics)] {
            for (k, v) in m {
                let clash = out.insert(k.clone(), v);
                assert!(clash.is_none(), "config key `{k}` is defined twice");
            }
        }
        out
    }

    /// SHA-256 of the compact JSON echo.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(&self.flat()).expect("echo serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    /// Applies `(key, value)` overrides in order. Unknown keys and ill-typed
    /// values are format errors.
    pub fn apply<I>(&self, layer: I) -> Result<RunConfig>
    where
        I: IntoIterator<Item = (String, Value)>,
    {
        let mut sections = [to_map(&self.run), to_map(&self.model), to_map(&self.metrics)];
        for (key, value) in layer {
            if matches!(value, Value::Object(_)) {
                return Err(Error::Format(format!("config key `{key}` must be a plain value; the file is flat")));
            }
            let slot = sections
                .iter_mut()
                .find(|m| m.contains_key(&key))
                .ok_or_else(|| Error::Format(format!("unknown config key `{key}`")))?;
            slot.insert(key, value);
        }
        let [run, model, metrics] = sections;
        let cfg = RunConfig { run: from_map(run)?, model: from_map(model)?, metrics: from_map(metrics)? };
        cfg.model.validate()?;
        Ok(cfg)
    }
}

/// Reads a flat TOML file into override pairs.
pub fn read_toml(path: &Path) -> Result<Vec<(String, Value)>> {
    let text = fs::read_to_string(path)?;
    parse_toml(&text)
}

pub fn parse_toml(text: &str) -> Result<Vec<(String, Value)>> {
    let table: toml::Table = toml::from_str(text).map_err(|e| Error::Format(format!("config file: {e}")))?;
    table
        .into_iter()
        .map(|(k, v)| {
            let json = serde_json::to_value(v).map_err(|e| Error::Format(format!("config key `{k}`: {e}")))?;
            Ok((k, json))
        })
        .collect()
}

/// The seed from `BANDGEN_SEED`, if set.
pub fn env_seed() -> Result<Option<(String, Value)>> {
    match std::env::var(SEED_ENV) {
        Ok(s) => {
            let seed: u64 =
                s.trim().parse().map_err(|_| Error::Input(format!("{SEED_ENV} must be an unsigned integer, got `{s}`")))?;
            Ok(Some(("seed".into(), Value::from(seed))))
        }
        Err(_) => Ok(None),
    }
}

/// Layers, lowest priority first: `base`, the seed environment variable,
/// command-line flags, then the config file.
pub fn resolve(base: &RunConfig, flags: Vec<(String, Value)>, file: Option<&Path>) -> Result<RunConfig> {
    let mut layer: Vec<(String, Value)> = env_seed()?.into_iter().collect();
    layer.extend(flags);
    if let Some(path) = file {
        layer.extend(read_toml(path)?);
    }
    base.apply(layer)
}
