//! Graphs to training sequences and batches.

use ndarray::Array2;

use super::Mode;
use crate::band::{band_reparameterize, TrainSequence};
use crate::error::{Error, Result};
use crate::graph::{Graph, OrderingFamily};
use crate::ordering::{order, OrderingConfig, TieBreak};
use crate::rng::derive_seed;

/// Orderings tried before a graph is declared too wide for the model.
pub const MAX_ORDERING_ATTEMPTS: usize = 64;
/// Random BFS orderings drawn to size baseline rows.
pub const BASELINE_BFS_SAMPLES: usize = 100_000;
const BASELINE_PERCENTILE: f64 = 0.999;

fn seed_dependent(cfg: &OrderingConfig) -> bool {
    match cfg.family {
        OrderingFamily::Bfs | OrderingFamily::Dfs => true,
        OrderingFamily::Cm => cfg.tie_break == TieBreak::Random,
        OrderingFamily::Identity | OrderingFamily::Exact => false,
    }
}

/// Orders `graph` and lays it out as a sequence of `width` band columns.
/// Randomized orderings that overflow the width are redrawn with derived
/// seeds, up to [`MAX_ORDERING_ATTEMPTS`] times.
pub fn fit_sequence(graph: &Graph, cfg: &OrderingConfig, width: usize) -> Result<TrainSequence> {
    let attempts = if seed_dependent(cfg) { MAX_ORDERING_ATTEMPTS } else { 1 };
    let mut last = None;
    for a in 0..attempts {
        let seed = if a == 0 { cfg.seed } else { derive_seed(cfg.seed, a as u64) };
        let o = order(graph, &cfg.with_seed(seed))?;
        match band_reparameterize(graph, &o, width) {
            Ok(band) => return Ok(band.to_sequence()),
            Err(e @ Error::BandOverflow { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Teacher-forced batch: for each sequence of `n + 2` rows, inputs are rows
/// `0..=n` and targets rows `1..=n+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub inputs: Array2<f64>,
    pub targets: Array2<f64>,
    pub lengths: Vec<usize>,
}

impl Batch {
    pub fn new(seqs: &[&TrainSequence]) -> Result<Batch> {
        let d = seqs.first().ok_or_else(|| Error::Input("empty batch".into()))?.row_len();
        let lengths: Vec<usize> = seqs.iter().map(|s| s.rows().len() - 1).collect();
        let total: usize = lengths.iter().sum();
        let mut inputs = Array2::zeros((total, d));
        let mut targets = Array2::zeros((total, d));
        let mut r = 0;
        for s in seqs {
            if s.row_len() != d {
                return Err(Error::Input(format!("mixed row widths {} and {d} in one batch", s.row_len())));
            }
            let rows = s.rows();
            for t in 0..rows.len() - 1 {
                for c in 0..d {
                    inputs[[r, c]] = rows[t][c] as f64;
                    targets[[r, c]] = rows[t + 1][c] as f64;
                }
                r += 1;
            }
        }
        Ok(Batch { inputs, targets, lengths })
    }

    /// Predicted entries, `Σ (n + 1)·d`.
    pub fn entries(&self) -> usize {
        self.targets.len()
    }
}

/// Row width (including the indicator) for a training corpus.
pub fn estimate_row_width(graphs: &[Graph], mode: Mode, cfg: &OrderingConfig) -> Result<usize> {
    estimate_row_width_with(graphs, mode, cfg, BASELINE_BFS_SAMPLES)
}

/// [`estimate_row_width`] with a configurable baseline sample count.
///
/// BwR: one plus the largest bandwidth of `cfg` orderings (graph `i` uses
/// seed `derive_seed(cfg.seed, i)`). Baseline: `samples` random orderings
/// allocated round-robin over graphs; one plus the 99.9th percentile
/// (nearest rank) of their bandwidths.
pub fn estimate_row_width_with(graphs: &[Graph], mode: Mode, cfg: &OrderingConfig, samples: usize) -> Result<usize> {
    if graphs.is_empty() {
        return Err(Error::Input("cannot size rows from an empty training set".into()));
    }
    let bw = |g: &Graph, s: u64| -> Result<usize> {
        let o = order(g, &cfg.with_seed(derive_seed(cfg.seed, s)))?;
        g.bandwidth_of_ordering(&o)
    };
    let value = match mode {
        Mode::Bwr => {
            let mut max = 0;
            for (i, g) in graphs.iter().enumerate() {
                max = max.max(bw(g, i as u64)?);
            }
            max
        }
        Mode::Baseline => {
            let samples = samples.max(1);
            let mut all = Vec::with_capacity(samples);
            for s in 0..samples {
                all.push(bw(&graphs[s % graphs.len()], s as u64)?);
            }
            all.sort_unstable();
            let rank = ((BASELINE_PERCENTILE * samples as f64).ceil() as usize).clamp(1, samples);
            all[rank - 1]
        }
    };
    Ok((value + 1).max(2))
}
