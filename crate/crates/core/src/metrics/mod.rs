//! Evaluation: graph statistics, MMD², precision/recall, ranking metrics.

pub mod eigen;
pub mod mmd;
pub mod orbits;
pub mod pr;
pub mod rank;
pub mod stats;

pub use mmd::{mmd2, mmd_suite, wasserstein1, Distance, Kernel, KernelConfig, MMDReport};
pub use orbits::{orbit_counts4, ORBITS};
pub use pr::{f1_pr, precision_recall, PRReport};
pub use rank::{average_precision, spearman_r};
pub use stats::{
    clustering_coefficients, extract_stats, laplacian_spectrum, GraphStats, StatsConfig,
};

use serde::{Deserialize, Serialize};

/// Metric settings shared by evaluation, temperature selection and tuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricConfig {
    pub clustering_bins: usize,
    pub spectrum_bins: usize,
    pub sigma_hist: f64,
    pub sigma_orbit: f64,
    pub pr_k: usize,
}

impl Default for MetricConfig {
    fn default() -> Self {
        let (s, k) = (StatsConfig::default(), KernelConfig::default());
        MetricConfig {
            clustering_bins: s.clustering_bins,
            spectrum_bins: s.spectrum_bins,
            sigma_hist: k.sigma_hist,
            sigma_orbit: k.sigma_orbit,
            pr_k: pr::DEFAULT_K,
        }
    }
}

impl MetricConfig {
    pub fn stats(&self) -> StatsConfig {
        StatsConfig { clustering_bins: self.clustering_bins, spectrum_bins: self.spectrum_bins }
    }

    pub fn kernels(&self) -> KernelConfig {
        KernelConfig { sigma_hist: self.sigma_hist, sigma_orbit: self.sigma_orbit }
    }
}
