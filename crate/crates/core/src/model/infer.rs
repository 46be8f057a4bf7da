//! Sampling, likelihoods and reconstruction quality of a trained model.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::data::{fit_sequence, Batch};
use super::network::{bce_entry, sigmoid, NormMode};
use super::params::ModelParams;
use super::ModelConfig;
use crate::band::{band_expand, BandMatrix};
use crate::error::{Error, Result};
use crate::graph::{Graph, Ordering};
use crate::metrics::{average_precision, extract_stats, mmd_suite, MMDReport, MetricConfig};
use crate::ordering::OrderingConfig;
use crate::rng::{self, derive_seed};

fn pool(workers: usize) -> Result<Option<rayon::ThreadPool>> {
    if workers <= 1 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map(Some)
        .map_err(|e| Error::Capability(format!("thread pool: {e}")))
}

/// Draws one graph. Each entry is Bernoulli(σ(ℓ/τ)); generation stops when
/// the indicator fires (ignored before the first node) or at `max_nodes`.
/// Nodes are labelled in generation order.
pub fn sample_one(params: &ModelParams, max_nodes: usize, temperature: f64, seed: u64) -> Graph {
    let d = params.row_width();
    let width = d - 1;
    let mut rng = rng::seeded(seed);
    let mut state = params.initial_state();
    let mut row = vec![0.0; d];
    row[0] = 1.0;
    let mut rows: Vec<Vec<bool>> = Vec::new();
    while rows.len() < max_nodes {
        let logits = params.step(&row, &mut state);
        let j = rows.len();
        let stop = rng.random::<f64>() < sigmoid(logits[0] / temperature);
        if stop && j > 0 {
            break;
        }
        let entries: Vec<bool> = (0..j.min(width))
            .map(|k| rng.random::<f64>() < sigmoid(logits[k + 1] / temperature))
            .collect();
        row.fill(0.0);
        for (k, &e) in entries.iter().enumerate() {
            row[k + 1] = f64::from(u8::from(e));
        }
        rows.push(entries);
    }
    let n = rows.len();
    let band = BandMatrix::from_rows(width, rows).expect("rows sized by construction");
    band_expand(&band, &Ordering::identity(n)).expect("identity ordering matches band")
}

/// `count` graphs; graph `i` uses seed `derive_seed(seed, i)`, so the output
/// does not depend on `workers`.
pub fn sample(params: &ModelParams, cfg: &ModelConfig, count: usize, seed: u64, workers: usize) -> Result<Vec<Graph>> {
    cfg.validate()?;
    let one = |i: usize| sample_one(params, cfg.max_nodes, cfg.temperature, derive_seed(seed, i as u64));
    Ok(match pool(workers)? {
        None => (0..count).map(one).collect(),
        Some(p) => p.install(|| (0..count).into_par_iter().map(one).collect()),
    })
}

/// Teacher-forced log-likelihood `Σ log p(target entry)` of `graph` under the
/// ordering `cfg` draws.
pub fn log_likelihood(params: &ModelParams, graph: &Graph, cfg: &OrderingConfig) -> Result<f64> {
    let seq = fit_sequence(graph, cfg, params.row_width() - 1)?;
    let batch = Batch::new(&[&seq])?;
    let f = params.forward(&batch.inputs, &batch.lengths, NormMode::Eval)?;
    Ok(-f.logits.iter().zip(&batch.targets).map(|(&l, &y)| bce_entry(l, y)).sum::<f64>())
}

/// Pooled teacher-forced probabilities and targets over all predicted
/// entries; graph `i` is ordered with seed `derive_seed(cfg.seed, i)`.
pub fn teacher_forced_probs(params: &ModelParams, graphs: &[Graph], cfg: &OrderingConfig) -> Result<(Vec<f64>, Vec<bool>)> {
    let mut probs = Vec::new();
    let mut labels = Vec::new();
    for (i, g) in graphs.iter().enumerate() {
        let seq = fit_sequence(g, &cfg.with_seed(derive_seed(cfg.seed, i as u64)), params.row_width() - 1)?;
        let batch = Batch::new(&[&seq])?;
        let f = params.forward(&batch.inputs, &batch.lengths, NormMode::Eval)?;
        probs.extend(f.logits.iter().map(|&l| sigmoid(l)));
        labels.extend(batch.targets.iter().map(|&y| y == 1.0));
    }
    Ok((probs, labels))
}

/// Micro-averaged AUPRC of teacher-forced predictions.
pub fn reconstruction_auprc(params: &ModelParams, graphs: &[Graph], cfg: &OrderingConfig) -> Result<f64> {
    let (p, y) = teacher_forced_probs(params, graphs, cfg)?;
    Ok(average_precision(&p, &y))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemperatureTrial {
    pub temperature: f64,
    pub mmd: MMDReport,
}

/// Picks the temperature from `grid` whose samples (as many as `reference`)
/// minimize mean MMD² against `reference`. Ties keep the earlier value.
pub fn select_temperature(
    params: &ModelParams,
    cfg: &ModelConfig,
    reference: &[Graph],
    grid: &[f64],
    seed: u64,
    metrics: &MetricConfig,
    workers: usize,
) -> Result<(f64, Vec<TemperatureTrial>)> {
    if grid.is_empty() || reference.is_empty() {
        return Err(Error::Input("temperature selection needs a grid and reference graphs".into()));
    }
    let ref_stats = extract_stats(reference, &metrics.stats(), workers)?;
    let mut trials = Vec::with_capacity(grid.len());
    for &t in grid {
        let c = ModelConfig { temperature: t, ..cfg.clone() };
        let samples = sample(params, &c, reference.len(), seed, workers)?;
        let st = extract_stats(&samples, &metrics.stats(), workers)?;
        trials.push(TemperatureTrial { temperature: t, mmd: mmd_suite(&st, &ref_stats, &metrics.kernels()) });
    }
    let best = trials
        .iter()
        .min_by(|a, b| a.mmd.mean.total_cmp(&b.mmd.mean))
        .expect("non-empty grid")
        .temperature;
    Ok((best, trials))
}
