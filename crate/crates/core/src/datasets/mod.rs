//! Synthetic graph corpora, JSON-lines storage and corpus utilities.

pub mod delaunay;
mod io;
mod report;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{self, derive_seed};

pub use io::{load_jsonl, parse_jsonl, save_jsonl, write_jsonl};
pub use report::{bandwidth_report, BandwidthReport, GraphBandwidth, Summary, REPORT_TSV_HEADER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    Community2,
    Planar,
    Grid2d,
}

impl std::str::FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "community2" => Ok(Self::Community2),
            "planar" => Ok(Self::Planar),
            "grid2d" => Ok(Self::Grid2d),
            other => Err(Error::input(format!("unknown dataset kind '{other}'"))),
        }
    }
}

impl std::fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Community2 => "community2",
            Self::Planar => "planar",
            Self::Grid2d => "grid2d",
        })
    }
}

/// Generates a synthetic corpus. `count` is ignored for Grid2d, which always
/// has 66 graphs.
pub fn generate(kind: DatasetKind, count: usize, seed: u64) -> Result<Vec<Graph>> {
    match kind {
        DatasetKind::Community2 => Ok(gen_community2(count, seed)),
        DatasetKind::Planar => gen_planar(count, seed),
        DatasetKind::Grid2d => Ok(gen_grid2d()),
    }
}

/// G(n, p): every pair independently with probability `p`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = rng::seeded(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Community2Params {
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub p_intra: f64,
    pub p_inter: f64,
}

impl Default for Community2Params {
    fn default() -> Self {
        Community2Params {
            min_nodes: 60,
            max_nodes: 160,
            p_intra: 0.3,
            p_inter: 0.05,
        }
    }
}

/// One two-community graph before the largest-component step: two
/// Erdős–Rényi blocks of sizes ⌈N/2⌉ and ⌊N/2⌋ joined by sparse random edges.
pub fn community2_raw(params: &Community2Params, seed: u64) -> Graph {
    let mut rng = rng::seeded(seed);
    let n = rng.random_range(params.min_nodes..=params.max_nodes);
    let split = n.div_ceil(2);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let same = (i < split) == (j < split);
            let p = if same { params.p_intra } else { params.p_inter };
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

pub fn gen_community2_with(params: &Community2Params, count: usize, seed: u64) -> Vec<Graph> {
    (0..count)
        .map(|i| community2_raw(params, derive_seed(seed, i as u64)).largest_component())
        .collect()
}

pub fn gen_community2(count: usize, seed: u64) -> Vec<Graph> {
    gen_community2_with(&Community2Params::default(), count, seed)
}

pub const PLANAR_NODES: usize = 64;
const PLANAR_RETRIES: usize = 16;

/// Delaunay graph of `points` uniform points in the unit square, resampling
/// the points on degeneracy.
pub fn planar_graph(points: usize, seed: u64) -> Result<Graph> {
    let mut rng = rng::seeded(seed);
    for _ in 0..PLANAR_RETRIES {
        let pts: Vec<[f64; 2]> = (0..points)
            .map(|_| [rng.random::<f64>(), rng.random::<f64>()])
            .collect();
        if let Ok(edges) = delaunay::delaunay_edges(&pts) {
            return Ok(Graph::from_edges(points, &edges));
        }
    }
    Err(Error::Numeric(format!(
        "degenerate point sets on {PLANAR_RETRIES} consecutive draws"
    )))
}

pub fn gen_planar(count: usize, seed: u64) -> Result<Vec<Graph>> {
    (0..count)
        .map(|i| planar_graph(PLANAR_NODES, derive_seed(seed, i as u64)))
        .collect()
}

/// One grid per unordered side pair `lo ≤ a ≤ b ≤ hi`.
pub fn gen_grids(lo: usize, hi: usize) -> Vec<Graph> {
    let mut out = Vec::new();
    for a in lo..=hi {
        for b in a..=hi {
            out.push(Graph::grid(a, b));
        }
    }
    out
}

/// The 66 grids with side lengths between 10 and 20.
pub fn gen_grid2d() -> Vec<Graph> {
    gen_grids(10, 20)
}

/// Repeats every graph `times` times. Training derives ordering seeds from
/// the corpus index, so each copy is seen under different random orders.
pub fn replicate(graphs: &[Graph], times: usize) -> Vec<Graph> {
    graphs
        .iter()
        .flat_map(|g| std::iter::repeat_n(g.clone(), times))
        .collect()
}

pub fn filter_connected(graphs: Vec<Graph>) -> Vec<Graph> {
    graphs.into_iter().filter(Graph::is_connected).collect()
}

/// Keeps graphs with `min ≤ n ≤ max`.
pub fn filter_size(graphs: Vec<Graph>, min: usize, max: usize) -> Vec<Graph> {
    graphs
        .into_iter()
        .filter(|g| (min..=max).contains(&g.n()))
        .collect()
}

/// Seeded shuffle followed by a contiguous three-way split. Sizes are the
/// floors of `len · fraction`; leftover items go to the parts with the largest
/// fractional remainders (earlier parts first on ties).
pub fn split<T>(mut items: Vec<T>, fractions: [f64; 3], seed: u64) -> Result<(Vec<T>, Vec<T>, Vec<T>)> {
    let total: f64 = fractions.iter().sum();
    if (total - 1.0).abs() > 1e-9 || fractions.iter().any(|&f| !(0.0..=1.0).contains(&f)) {
        return Err(Error::input(format!(
            "split fractions must be in [0, 1] and sum to 1, got {fractions:?}"
        )));
    }
    let len = items.len();
    let exact: Vec<f64> = fractions.iter().map(|f| f * len as f64).collect();
    let mut sizes: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let mut left = len - sizes.iter().sum::<usize>();
    let mut by_remainder: Vec<usize> = (0..3).collect();
    by_remainder.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in by_remainder.iter().cycle() {
        if left == 0 {
            break;
        }
        sizes[i] += 1;
        left -= 1;
    }
    items.shuffle(&mut rng::seeded(seed));
    let test = items.split_off(sizes[0] + sizes[1]);
    let val = items.split_off(sizes[0]);
    Ok((items, val, test))
}
