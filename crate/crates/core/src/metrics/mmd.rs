//! Squared maximum mean discrepancy with Gaussian kernels.

use serde::{Deserialize, Serialize};

use super::stats::GraphStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distance {
    /// Earth mover's distance between 1-D histograms, in bin units.
    Wasserstein,
    Euclidean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    pub distance: Distance,
    pub sigma: f64,
}

impl Kernel {
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        let d = match self.distance {
            Distance::Wasserstein => wasserstein1(x, y),
            Distance::Euclidean => euclidean(x, y),
        };
        (-d * d / (2.0 * self.sigma * self.sigma)).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelConfig {
    pub sigma_hist: f64,
    pub sigma_orbit: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig { sigma_hist: 1.0, sigma_orbit: 30.0 }
    }
}

impl KernelConfig {
    pub fn hist(&self) -> Kernel {
        Kernel { distance: Distance::Wasserstein, sigma: self.sigma_hist }
    }

    pub fn orbit(&self) -> Kernel {
        Kernel { distance: Distance::Euclidean, sigma: self.sigma_orbit }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MMDReport {
    pub degree: f64,
    pub cluster: f64,
    pub orbit: f64,
    pub spectra: f64,
    pub mean: f64,
}

/// W1 between two histograms of possibly different lengths (the shorter is
/// zero-padded): the L1 distance of their cumulative sums.
pub fn wasserstein1(x: &[f64], y: &[f64]) -> f64 {
    let (mut cx, mut cy, mut total) = (0.0, 0.0, 0.0);
    for i in 0..x.len().max(y.len()) {
        cx += x.get(i).copied().unwrap_or(0.0);
        cy += y.get(i).copied().unwrap_or(0.0);
        total += (cx - cy).abs();
    }
    total
}

pub fn euclidean(x: &[f64], y: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..x.len().max(y.len()) {
        let d = x.get(i).copied().unwrap_or(0.0) - y.get(i).copied().unwrap_or(0.0);
        total += d * d;
    }
    total.sqrt()
}

/// Biased (V-statistic) MMD² estimate, clamped at zero. Both sets must be
/// non-empty.
pub fn mmd2<V: AsRef<[f64]>>(a: &[V], b: &[V], kernel: Kernel) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "mmd2 needs non-empty sets");
    let mean_k = |s: &[V], t: &[V]| {
        let mut total = 0.0;
        for x in s {
            for y in t {
                total += kernel.eval(x.as_ref(), y.as_ref());
            }
        }
        total / (s.len() * t.len()) as f64
    };
    (mean_k(a, a) + mean_k(b, b) - 2.0 * mean_k(a, b)).max(0.0)
}

pub fn mmd_suite(generated: &[GraphStats], reference: &[GraphStats], kernels: &KernelConfig) -> MMDReport {
    let pick = |f: fn(&GraphStats) -> &Vec<f64>| {
        let a: Vec<&[f64]> = generated.iter().map(|s| f(s).as_slice()).collect();
        let b: Vec<&[f64]> = reference.iter().map(|s| f(s).as_slice()).collect();
        (a, b)
    };
    let (a, b) = pick(|s| &s.degree_hist);
    let degree = mmd2(&a, &b, kernels.hist());
    let (a, b) = pick(|s| &s.clustering_hist);
    let cluster = mmd2(&a, &b, kernels.hist());
    let (a, b) = pick(|s| &s.orbit_vec);
    let orbit = mmd2(&a, &b, kernels.orbit());
    let (a, b) = pick(|s| &s.spectrum_hist);
    let spectra = mmd2(&a, &b, kernels.hist());
    MMDReport { degree, cluster, orbit, spectra, mean: (degree + cluster + orbit + spectra) / 4.0 }
}
