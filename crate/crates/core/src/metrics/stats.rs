//! Per-graph statistics compared by the MMD suite.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eigen::symmetric_eigenvalues;
use super::orbits::orbit_mean;
use crate::error::Result;
use crate::graph::Graph;

/// Eigenvalues this far outside `[0, 2]` are rounding noise and get clamped.
pub const SPECTRUM_CLAMP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StatsConfig {
    pub clustering_bins: usize,
    pub spectrum_bins: usize,
}

impl Default for StatsConfig {
    fn default() -> Self {
        StatsConfig { clustering_bins: 100, spectrum_bins: 200 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphStats {
    /// Bin `k` is the fraction of nodes with degree `k`, for `k` up to the max degree.
    pub degree_hist: Vec<f64>,
    pub clustering_hist: Vec<f64>,
    pub orbit_vec: Vec<f64>,
    pub spectrum_hist: Vec<f64>,
}

impl GraphStats {
    pub fn of(g: &Graph, cfg: &StatsConfig) -> Result<GraphStats> {
        Ok(GraphStats {
            degree_hist: degree_hist(g),
            clustering_hist: histogram(&clustering_coefficients(g), cfg.clustering_bins, 1.0),
            orbit_vec: orbit_mean(g),
            spectrum_hist: spectrum_hist(g, cfg.spectrum_bins)?,
        })
    }
}

/// Statistics for every graph, in input order. `workers > 1` fans out over a
/// dedicated thread pool; the result does not depend on the worker count.
pub fn extract_stats(graphs: &[Graph], cfg: &StatsConfig, workers: usize) -> Result<Vec<GraphStats>> {
    if workers <= 1 {
        return graphs.iter().map(|g| GraphStats::of(g, cfg)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| crate::Error::Capability(format!("thread pool: {e}")))?;
    pool.install(|| graphs.par_iter().map(|g| GraphStats::of(g, cfg)).collect())
}

pub fn degree_hist(g: &Graph) -> Vec<f64> {
    let mut hist = vec![0.0; g.max_degree() + 1];
    for v in 0..g.n() {
        hist[g.degree(v)] += 1.0;
    }
    normalize(&mut hist);
    hist
}

pub fn clustering_coefficients(g: &Graph) -> Vec<f64> {
    (0..g.n())
        .map(|v| {
            let nb = g.neighbors(v);
            let d = nb.len();
            if d < 2 {
                return 0.0;
            }
            let mut tri = 0usize;
            for (i, &a) in nb.iter().enumerate() {
                tri += nb[i + 1..].iter().filter(|&&b| g.has_edge(a, b)).count();
            }
            2.0 * tri as f64 / (d * (d - 1)) as f64
        })
        .collect()
}

/// Eigenvalues of `I − D^{-1/2} A D^{-1/2}`, ascending. Isolated nodes get a
/// zero row and column.
pub fn laplacian_spectrum(g: &Graph) -> Result<Vec<f64>> {
    let n = g.n();
    let inv_sqrt: Vec<f64> = (0..n)
        .map(|v| match g.degree(v) {
            0 => 0.0,
            d => 1.0 / (d as f64).sqrt(),
        })
        .collect();
    let mut a = vec![0.0; n * n];
    for v in 0..n {
        if g.degree(v) > 0 {
            a[v * n + v] = 1.0;
        }
        for &u in g.neighbors(v) {
            a[v * n + u] = -inv_sqrt[v] * inv_sqrt[u];
        }
    }
    symmetric_eigenvalues(a, n)
}

pub fn spectrum_hist(g: &Graph, bins: usize) -> Result<Vec<f64>> {
    let eig = laplacian_spectrum(g)?;
    let clamped: Vec<f64> = eig
        .iter()
        .map(|&l| {
            debug_assert!((-SPECTRUM_CLAMP_TOL..=2.0 + SPECTRUM_CLAMP_TOL).contains(&l), "eigenvalue {l}");
            // Eigenvalues that sit on bin edges (0, 1/2, 1, ...) come out a
            // few ulps either side depending on node labels; snapping them
            // keeps the histogram label-independent.
            ((l / SPECTRUM_CLAMP_TOL).round() * SPECTRUM_CLAMP_TOL).clamp(0.0, 2.0)
        })
        .collect();
    Ok(histogram(&clamped, bins, 2.0))
}

/// Normalized histogram of values in `[0, upper]` over equal-width bins; the
/// upper endpoint falls in the last bin.
pub fn histogram(values: &[f64], bins: usize, upper: f64) -> Vec<f64> {
    let mut hist = vec![0.0; bins];
    for &x in values {
        let b = ((x / upper) * bins as f64).floor();
        let b = (b.max(0.0) as usize).min(bins - 1);
        hist[b] += 1.0;
    }
    normalize(&mut hist);
    hist
}

/// Sums adjacent bins down to `out` bins (bin `i` goes to `i·out/len`).
pub fn downsample(hist: &[f64], out: usize) -> Vec<f64> {
    let mut res = vec![0.0; out];
    for (i, &x) in hist.iter().enumerate() {
        res[i * out / hist.len()] += x;
    }
    res
}

fn normalize(hist: &mut [f64]) {
    let total: f64 = hist.iter().sum();
    if total > 0.0 {
        hist.iter_mut().for_each(|x| *x /= total);
    }
}
