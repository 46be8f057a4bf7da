//! Fixed inputs shared by the benchmarks.

use bandgen_core::datasets::{erdos_renyi, gen_community2};
use bandgen_core::model::{fit_sequence, Batch, Mode};
use bandgen_core::{Graph, TrainSequence};

/// Square grids from 10×10 up to 20×20.
pub fn square_grids() -> Vec<(usize, Graph)> {
    [10, 15, 20].into_iter().map(|s| (s, Graph::grid(s, s))).collect()
}

pub fn community(count: usize) -> Vec<Graph> {
    gen_community2(count, 1)
}

/// Sparse random graphs for statistics extraction.
pub fn sparse(n: usize) -> Graph {
    erdos_renyi(n, 4.0 / n as f64, 7)
}

/// BwR training sequences of the 3..6 mini-grids and their row width.
pub fn mini_grid_batch() -> (usize, Batch) {
    let grids = bandgen_core::datasets::gen_grids(3, 6);
    let ord = Mode::Bwr.ordering(0);
    let seqs: Vec<TrainSequence> = grids.iter().map(|g| fit_sequence(g, &ord, 7).unwrap()).collect();
    let refs: Vec<&TrainSequence> = seqs.iter().collect();
    (8, Batch::new(&refs).unwrap())
}
