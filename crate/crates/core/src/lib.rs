//! Bandwidth-restricted graph generation.
//!
//! Graphs are reordered with Cuthill-McKee so that every edge lies close to
//! the diagonal of the adjacency matrix, which is then stored as an `n × φ`
//! band. A small GRU generator emits one band row per node, so its output
//! space scales with `n·φ` instead of `n²`. The [`metrics`] module holds the
//! evaluation harness (MMD² over graph statistics, precision/recall, AUPRC).

pub mod band;
pub mod datasets;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod model;
pub mod ordering;
pub mod rng;

pub use band::{
    band_expand, band_reparameterize, banded_edge_count, banded_edge_set, savings_factor,
    BandMatrix, TrainSequence,
};
pub use error::{Category, Error, Result};
pub use graph::{CleanStats, Graph, Ordering, OrderingFamily};
pub use ordering::{OrderingConfig, TieBreak};
