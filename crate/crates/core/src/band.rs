//! Band-matrix reparameterization of ordered adjacency matrices.
//!
//! Under an ordering, row `i` of the band stores the lower-triangular entries
//! `A[i][i-1], A[i][i-2], …, A[i][i-width]`, nearest neighbor first: entry
//! `(i, k)` stands for the edge `{i, i-1-k}`. Rows near the top are shorter
//! because they have fewer predecessors.

use crate::error::{Error, Result};
use crate::graph::{Graph, Ordering};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandMatrix {
    width: usize,
    rows: Vec<Vec<bool>>,
}

impl BandMatrix {
    /// All-zero band for `n` nodes.
    pub fn zeros(n: usize, width: usize) -> Self {
        let rows = (0..n).map(|i| vec![false; i.min(width)]).collect();
        BandMatrix { width, rows }
    }

    /// Builds a band from explicit rows, checking that row `i` has exactly
    /// `min(i, width)` entries.
    pub fn from_rows(width: usize, rows: Vec<Vec<bool>>) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != i.min(width) {
                return Err(Error::format(format!(
                    "band row {i} has {} entries, expected {}",
                    row.len(),
                    i.min(width)
                )));
            }
        }
        Ok(BandMatrix { width, rows })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    pub fn get(&self, i: usize, k: usize) -> bool {
        self.rows[i][k]
    }

    pub fn set(&mut self, i: usize, k: usize, value: bool) {
        self.rows[i][k] = value;
    }

    /// Edges in position labels, `(i-1-k, i)`.
    pub fn position_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(move |(k, _)| (i - 1 - k, i))
        })
    }

    /// Inverse of [`BandMatrix::to_sequence`].
    pub fn from_sequence(seq: &TrainSequence) -> Result<Self> {
        seq.to_band()
    }

    pub fn to_sequence(&self) -> TrainSequence {
        let cols = self.width + 1;
        let n = self.n();
        let mut rows = Vec::with_capacity(n + 2);
        let mut boundary = vec![0u8; cols];
        boundary[0] = 1;
        rows.push(boundary.clone());
        for row in &self.rows {
            let mut r = vec![0u8; cols];
            for (k, &b) in row.iter().enumerate() {
                r[k + 1] = u8::from(b);
            }
            rows.push(r);
        }
        rows.push(boundary);
        TrainSequence { width: self.width, rows }
    }
}

/// The model-facing layout of a band: a boundary row, one row per node, and a
/// closing boundary row. Column 0 is the boundary indicator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainSequence {
    width: usize,
    rows: Vec<Vec<u8>>,
}

impl TrainSequence {
    /// Wraps raw rows. Shape and indicator layout are validated by
    /// [`TrainSequence::to_band`].
    pub fn from_rows(width: usize, rows: Vec<Vec<u8>>) -> Self {
        TrainSequence { width, rows }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Columns per row, `width + 1`.
    pub fn row_len(&self) -> usize {
        self.width + 1
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// Number of nodes encoded.
    pub fn node_count(&self) -> usize {
        self.rows.len().saturating_sub(2)
    }

    /// Inverse of [`BandMatrix::to_sequence`].
    pub fn to_band(&self) -> Result<BandMatrix> {
        let cols = self.width + 1;
        if self.rows.len() < 2 {
            return Err(Error::format("sequence needs at least the two boundary rows"));
        }
        let last = self.rows.len() - 1;
        let mut band_rows = Vec::with_capacity(last.saturating_sub(1));
        for (t, row) in self.rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::format(format!(
                    "sequence row {t} has {} columns, expected {cols}",
                    row.len()
                )));
            }
            if row.iter().any(|&x| x > 1) {
                return Err(Error::format(format!("sequence row {t} is not binary")));
            }
            let boundary = t == 0 || t == last;
            if boundary {
                if row[0] != 1 || row[1..].iter().any(|&x| x != 0) {
                    return Err(Error::format(format!(
                        "boundary row {t} must be [1, 0, …, 0]"
                    )));
                }
                continue;
            }
            if row[0] != 0 {
                return Err(Error::format(format!("interior row {t} has indicator set")));
            }
            let i = t - 1;
            let len = i.min(self.width);
            if row[1 + len..].iter().any(|&x| x != 0) {
                return Err(Error::format(format!(
                    "row {t} references a node before the first one"
                )));
            }
            band_rows.push(row[1..1 + len].iter().map(|&x| x == 1).collect());
        }
        Ok(BandMatrix {
            width: self.width,
            rows: band_rows,
        })
    }
}

/// Stores `graph` under `ordering` as a band of the given width.
///
/// Fails with [`Error::BandOverflow`] (naming the edge in original labels) if
/// some edge is stretched further than `width`.
pub fn band_reparameterize(graph: &Graph, ordering: &Ordering, width: usize) -> Result<BandMatrix> {
    if ordering.len() != graph.n() {
        return Err(Error::input(format!(
            "ordering has length {} but graph has {} nodes",
            ordering.len(),
            graph.n()
        )));
    }
    let perm = ordering.perm();
    let mut band = BandMatrix::zeros(graph.n(), width);
    for (u, v) in graph.edges() {
        let (pu, pv) = (perm[u], perm[v]);
        let (lo, hi) = if pu < pv { (pu, pv) } else { (pv, pu) };
        let stretch = hi - lo;
        if stretch > width {
            return Err(Error::BandOverflow { u, v, stretch, width });
        }
        band.rows[hi][stretch - 1] = true;
    }
    Ok(band)
}

/// Rebuilds the graph in original labels from a band and the ordering that
/// produced it.
pub fn band_expand(band: &BandMatrix, ordering: &Ordering) -> Result<Graph> {
    if ordering.len() != band.n() {
        return Err(Error::input("ordering and band sizes differ"));
    }
    let inv = ordering.inverse();
    let edges: Vec<_> = band
        .position_edges()
        .map(|(a, b)| (inv[a], inv[b]))
        .collect();
    Ok(Graph::from_edge_list(band.n(), &edges)?.0)
}

/// All pairs `(i, j)`, `i < j`, with `j - i ≤ width`, ordered by `i` then `j`.
pub fn banded_edge_set(n: usize, width: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(banded_edge_count(n, width));
    for i in 0..n {
        for j in i + 1..n.min(i + width + 1) {
            out.push((i, j));
        }
    }
    out
}

/// `|banded_edge_set(n, width)|` in closed form.
pub fn banded_edge_count(n: usize, width: usize) -> usize {
    if n == 0 {
        return 0;
    }
    if width >= n {
        n * (n - 1) / 2
    } else {
        n * width - width * (width + 1) / 2
    }
}

/// Complete-graph pair count over band pair count: how many times smaller the
/// banded output space is. Full bands, `width == 0` and `n < 2` give 1.0.
pub fn savings_factor(n: usize, width: usize) -> f64 {
    if n < 2 {
        return 1.0;
    }
    let width = width.max(1);
    if width >= n - 1 {
        return 1.0;
    }
    (n * (n - 1) / 2) as f64 / banded_edge_count(n, width) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::OrderingFamily;
    use proptest::prelude::*;

    #[test]
    fn path_band() {
        let band = band_reparameterize(&Graph::path(4), &Ordering::identity(4), 1).unwrap();
        let expected: Vec<Vec<bool>> = vec![vec![], vec![true], vec![true], vec![true]];
        assert_eq!(band.rows(), expected.as_slice());
        assert_eq!(band_expand(&band, &Ordering::identity(4)).unwrap(), Graph::path(4));
    }

    #[test]
    fn cycle_overflows_narrow_band() {
        let err = band_reparameterize(&Graph::cycle(6), &Ordering::identity(6), 2).unwrap_err();
        match err {
            Error::BandOverflow { u, v, stretch, width } => {
                assert_eq!((u, v, stretch, width), (0, 5, 5, 2));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wider_band_pads_with_zeros() {
        let band = band_reparameterize(&Graph::path(4), &Ordering::identity(4), 3).unwrap();
        assert_eq!(band.rows()[3], vec![true, false, false]);
        assert_eq!(band_expand(&band, &Ordering::identity(4)).unwrap(), Graph::path(4));
    }

    #[test]
    fn path_sequence_layout() {
        let band = band_reparameterize(&Graph::path(4), &Ordering::identity(4), 1).unwrap();
        let seq = band.to_sequence();
        let expected: Vec<Vec<u8>> = vec![
            vec![1, 0],
            vec![0, 0],
            vec![0, 1],
            vec![0, 1],
            vec![0, 1],
            vec![1, 0],
        ];
        assert_eq!(seq.rows(), expected.as_slice());
        assert_eq!(seq.to_band().unwrap(), band);
    }

    #[test]
    fn edgeless_sequence() {
        let band = band_reparameterize(&Graph::empty(2), &Ordering::identity(2), 1).unwrap();
        let seq = band.to_sequence();
        assert_eq!(seq.rows().len(), 4);
        assert!(seq.rows()[1..3].iter().all(|r| r.iter().all(|&x| x == 0)));
    }

    #[test]
    fn malformed_sequences() {
        let bad_first = TrainSequence::from_rows(1, vec![vec![0, 0], vec![0, 0], vec![1, 0]]);
        assert!(bad_first.to_band().is_err());
        let interior_flag = TrainSequence::from_rows(1, vec![vec![1, 0], vec![1, 0], vec![1, 0]]);
        assert!(interior_flag.to_band().is_err());
        // row for node 0 cannot point backwards
        let negative = TrainSequence::from_rows(1, vec![vec![1, 0], vec![0, 1], vec![1, 0]]);
        assert!(negative.to_band().is_err());
        let short = TrainSequence::from_rows(1, vec![vec![1, 0]]);
        assert!(short.to_band().is_err());
        let ragged = TrainSequence::from_rows(2, vec![vec![1, 0, 0], vec![0, 0], vec![1, 0, 0]]);
        assert!(ragged.to_band().is_err());
    }

    #[test]
    fn banded_edge_set_examples() {
        assert_eq!(banded_edge_set(4, 1), vec![(0, 1), (1, 2), (2, 3)]);
        assert_eq!(banded_edge_set(5, 4).len(), 10);
        assert_eq!(banded_edge_set(10, 2).len(), 17);
        assert_eq!(banded_edge_count(10, 2), 17);
    }

    #[test]
    fn closed_form_matches_enumeration() {
        for n in 1..=50 {
            for w in 0..=n + 1 {
                let brute = (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .filter(|&(i, j)| j - i <= w)
                    .count();
                assert_eq!(banded_edge_count(n, w), brute, "n={n} w={w}");
                assert_eq!(banded_edge_set(n, w).len(), brute);
            }
        }
    }

    #[test]
    fn savings_examples() {
        assert!((savings_factor(10, 2) - 45.0 / 17.0).abs() < 1e-15);
        assert_eq!(savings_factor(5, 4), 1.0);
        assert_eq!(savings_factor(5, 9), 1.0);
        assert_eq!(savings_factor(1, 1), 1.0);
    }

    #[test]
    fn savings_monotone_in_width() {
        for n in 2..=60 {
            let mut prev = f64::INFINITY;
            for w in 1..n + 2 {
                let s = savings_factor(n, w);
                assert!(s <= prev, "n={n} w={w}");
                assert!(s >= 1.0);
                prev = s;
            }
        }
    }

    fn arb_band() -> impl Strategy<Value = BandMatrix> {
        (1usize..12, 0usize..5).prop_flat_map(|(n, w)| {
            let lens: Vec<usize> = (0..n).map(|i| i.min(w)).collect();
            let total: usize = lens.iter().sum();
            proptest::collection::vec(any::<bool>(), total).prop_map(move |bits| {
                let mut it = bits.into_iter();
                let rows = lens.iter().map(|&l| it.by_ref().take(l).collect()).collect();
                BandMatrix::from_rows(w, rows).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn sequence_round_trip(band in arb_band()) {
            prop_assert_eq!(band.to_sequence().to_band().unwrap(), band);
        }

        #[test]
        fn band_round_trip_under_random_order(
            n in 1usize..14,
            raw in proptest::collection::vec((0usize..14, 0usize..14), 0..30),
            seed in any::<u64>(),
            extra in 0usize..3,
        ) {
            use rand::seq::SliceRandom;
            let edges: Vec<_> = raw.into_iter().map(|(a, b)| (a % n, b % n)).collect();
            let g = Graph::from_edge_list(n, &edges).unwrap().0;
            let mut seq: Vec<usize> = (0..n).collect();
            seq.shuffle(&mut crate::rng::seeded(seed));
            let o = Ordering::from_sequence(&seq, OrderingFamily::Bfs).unwrap();
            let w = g.bandwidth_of_ordering(&o).unwrap() + extra;
            let band = band_reparameterize(&g, &o, w).unwrap();
            for (i, row) in band.rows().iter().enumerate() {
                for (k, &b) in row.iter().enumerate() {
                    if b {
                        let j = i - 1 - k;
                        prop_assert!(i - j >= 1 && i - j <= w);
                    }
                }
            }
            prop_assert_eq!(band_expand(&band, &o).unwrap(), g);
        }
    }
}
