//! k-nearest-neighbour manifold precision and recall over graph descriptors.

use serde::{Deserialize, Serialize};

use super::stats::{downsample, GraphStats};
use crate::error::{Error, Result};

pub const FEATURE_BINS: usize = 32;
pub const DEFAULT_K: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PRReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl PRReport {
    pub fn new(precision: f64, recall: f64) -> PRReport {
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        PRReport { precision, recall, f1 }
    }
}

/// Degree histogram (degrees past the last bin are clamped into it),
/// clustering and spectrum histograms, each reduced to [`FEATURE_BINS`].
pub fn features(stats: &GraphStats) -> Vec<f64> {
    let mut deg = vec![0.0; FEATURE_BINS];
    for (d, &x) in stats.degree_hist.iter().enumerate() {
        deg[d.min(FEATURE_BINS - 1)] += x;
    }
    let mut out = deg;
    out.extend(downsample(&stats.clustering_hist, FEATURE_BINS));
    out.extend(downsample(&stats.spectrum_hist, FEATURE_BINS));
    out
}

fn dist2(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Squared distance from each point to its `k`-th nearest other point.
fn knn_radii2(points: &[Vec<f64>], k: usize) -> Vec<f64> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut d: Vec<f64> =
                points.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, q)| dist2(p, q)).collect();
            let (_, kth, _) = d.select_nth_unstable_by(k - 1, f64::total_cmp);
            *kth
        })
        .collect()
}

/// Fraction of `queries` inside at least one `support` point's k-NN ball.
fn coverage(queries: &[Vec<f64>], support: &[Vec<f64>], radii2: &[f64]) -> f64 {
    let hit = queries
        .iter()
        .filter(|q| support.iter().zip(radii2).any(|(s, &r)| dist2(q, s) <= r))
        .count();
    hit as f64 / queries.len() as f64
}

pub fn precision_recall(generated: &[Vec<f64>], reference: &[Vec<f64>], k: usize) -> Result<PRReport> {
    if k == 0 {
        return Err(Error::Input("k must be at least 1".into()));
    }
    for (name, set) in [("generated", generated), ("reference", reference)] {
        if set.len() <= k {
            return Err(Error::Input(format!("{name} set has {} samples, need more than k = {k}", set.len())));
        }
    }
    let precision = coverage(generated, reference, &knn_radii2(reference, k));
    let recall = coverage(reference, generated, &knn_radii2(generated, k));
    Ok(PRReport::new(precision, recall))
}

pub fn f1_pr(generated: &[GraphStats], reference: &[GraphStats], k: usize) -> Result<PRReport> {
    let g: Vec<Vec<f64>> = generated.iter().map(features).collect();
    let r: Vec<Vec<f64>> = reference.iter().map(features).collect();
    precision_recall(&g, &r, k)
}
