use serde::{Deserialize, Serialize};

use crate::band::savings_factor;
use crate::graph::Graph;
use crate::ordering::{self, OrderingConfig};
use crate::rng::derive_seed;

pub const REPORT_TSV_HEADER: &str =
    "dataset\tn_mean\tn_std\tbw_mean\tbw_std\tsavings_mean\tsavings_std\tbw_max";

/// Mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
}

impl Summary {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Summary {
        let v: Vec<f64> = values.into_iter().collect();
        if v.is_empty() {
            return Summary { mean: 0.0, std: 0.0 };
        }
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64;
        Summary { mean, std: var.sqrt() }
    }

    pub fn contains(&self, x: f64, sigmas: f64) -> bool {
        (x - self.mean).abs() <= sigmas * self.std
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphBandwidth {
    pub n: usize,
    pub bandwidth: usize,
    pub savings: f64,
}

/// Node count, ordering bandwidth and savings factor of a corpus, plus the
/// corpus-wide maximum bandwidth that sizes a banded model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandwidthReport {
    pub dataset: String,
    pub n: Summary,
    pub bandwidth: Summary,
    pub savings: Summary,
    pub bw_max: usize,
    pub per_graph: Vec<GraphBandwidth>,
}

impl BandwidthReport {
    pub fn len(&self) -> usize {
        self.per_graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_graph.is_empty()
    }

    /// Share of graphs whose bandwidth is at most `limit`.
    pub fn fraction_at_most(&self, limit: usize) -> f64 {
        if self.per_graph.is_empty() {
            return 0.0;
        }
        let hits = self.per_graph.iter().filter(|g| g.bandwidth <= limit).count();
        hits as f64 / self.per_graph.len() as f64
    }

    pub fn tsv_row(&self) -> String {
        format!(
            "{}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{}",
            self.dataset,
            self.n.mean,
            self.n.std,
            self.bandwidth.mean,
            self.bandwidth.std,
            self.savings.mean,
            self.savings.std,
            self.bw_max
        )
    }
}

/// Orders every graph with `cfg` (graph `i` uses seed `derive_seed(cfg.seed, i)`)
/// and summarizes bandwidths and savings factors.
pub fn bandwidth_report(dataset: &str, graphs: &[Graph], cfg: &OrderingConfig) -> BandwidthReport {
    let per_graph: Vec<GraphBandwidth> = graphs
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let c = cfg.with_seed(derive_seed(cfg.seed, i as u64));
            let o = ordering::order(g, &c).expect("heuristic orderings are infallible");
            let bandwidth = g.bandwidth_of_ordering(&o).expect("ordering matches graph");
            GraphBandwidth {
                n: g.n(),
                bandwidth,
                savings: savings_factor(g.n(), bandwidth),
            }
        })
        .collect();
    BandwidthReport {
        dataset: dataset.to_string(),
        n: Summary::of(per_graph.iter().map(|g| g.n as f64)),
        bandwidth: Summary::of(per_graph.iter().map(|g| g.bandwidth as f64)),
        savings: Summary::of(per_graph.iter().map(|g| g.savings)),
        bw_max: per_graph.iter().map(|g| g.bandwidth).max().unwrap_or(0),
        per_graph,
    }
}
