//! Undirected simple graphs and node orderings.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected simple graph stored as sorted adjacency lists.
///
/// Invariants: at least one node, `j ∈ adj[i] ⇔ i ∈ adj[j]`, no self-loops,
/// every list strictly ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

/// What [`Graph::from_edge_list`] silently dropped.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CleanStats {
    pub duplicates: usize,
    pub self_loops: usize,
}

impl Graph {
    /// Builds a graph from an arbitrary edge list. Duplicate edges (in either
    /// orientation) and self-loops are dropped and counted.
    pub fn from_edge_list(n: usize, edges: &[(usize, usize)]) -> Result<(Graph, CleanStats)> {
        if n == 0 {
            return Err(Error::input("graph must have at least one node"));
        }
        let mut stats = CleanStats::default();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::input(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            if u == v {
                stats.self_loops += 1;
                continue;
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut dup_half_edges = 0;
        for list in &mut adj {
            list.sort_unstable();
            let before = list.len();
            list.dedup();
            dup_half_edges += before - list.len();
        }
        stats.duplicates = dup_half_edges / 2;
        Ok((Graph { adj }, stats))
    }

    /// Like [`Graph::from_edge_list`] but for edge lists that are known to be
    /// clean; panics on out-of-range indices.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Graph {
        Self::from_edge_list(n, edges)
            .expect("edge list within range")
            .0
    }

    pub fn empty(n: usize) -> Graph {
        assert!(n >= 1, "graph must have at least one node");
        Graph { adj: vec![Vec::new(); n] }
    }

    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3);
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        Self::from_edges(n, &edges)
    }

    /// Star with node 0 at the center and `leaves` leaves.
    pub fn star(leaves: usize) -> Graph {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Self::from_edges(leaves + 1, &edges)
    }

    /// `rows × cols` lattice; node `(r, c)` has index `r * cols + c`.
    pub fn grid(rows: usize, cols: usize) -> Graph {
        let mut edges = Vec::with_capacity(2 * rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    edges.push((v, v + 1));
                }
                if r + 1 < rows {
                    edges.push((v, v + cols));
                }
            }
        }
        Self::from_edges(rows * cols, &edges)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Component label per node, components numbered in order of their
    /// smallest node index.
    pub fn component_labels(&self) -> (Vec<usize>, usize) {
        let n = self.n();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    if label[v] == usize::MAX {
                        label[v] = count;
                        queue.push_back(v);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// Node sets of each component, each sorted, components ordered by their
    /// smallest node index.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let (label, count) = self.component_labels();
        let mut comps = vec![Vec::new(); count];
        for (v, &c) in label.iter().enumerate() {
            comps[c].push(v);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.component_labels().1 == 1
    }

    /// Subgraph induced by `nodes`, relabeled `0..nodes.len()` in the given
    /// order.
    pub fn induced(&self, nodes: &[usize]) -> Graph {
        assert!(!nodes.is_empty());
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in nodes.iter().enumerate() {
            index[v] = i;
        }
        let mut adj = vec![Vec::new(); nodes.len()];
        for (i, &v) in nodes.iter().enumerate() {
            for &w in &self.adj[v] {
                if index[w] != usize::MAX {
                    adj[i].push(index[w]);
                }
            }
            adj[i].sort_unstable();
        }
        Graph { adj }
    }

    /// Largest connected component; ties go to the component with the smallest
    /// node index. Node order is preserved.
    pub fn largest_component(&self) -> Graph {
        let comps = self.components();
        let best = comps
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i)
            .expect("at least one component");
        if comps.len() == 1 {
            return self.clone();
        }
        self.induced(&comps[best])
    }

    /// Sorted degree sequence.
    pub fn degree_multiset(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.adj.iter().map(Vec::len).collect();
        d.sort_unstable();
        d
    }

    /// BFS distances from `root`; `usize::MAX` for unreachable nodes.
    pub fn bfs_distances(&self, root: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        dist[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Relabels nodes so that node `i` of the result is node `perm⁻¹(i)` of
    /// `self`.
    pub fn apply_ordering(&self, ordering: &Ordering) -> Result<Graph> {
        ordering.check_len(self.n())?;
        let perm = ordering.perm();
        let mut adj = vec![Vec::new(); self.n()];
        for (u, list) in self.adj.iter().enumerate() {
            let pu = perm[u];
            adj[pu] = list.iter().map(|&v| perm[v]).collect();
            adj[pu].sort_unstable();
        }
        Ok(Graph { adj })
    }

    /// Maximum `|perm[u] − perm[v]|` over all edges; 0 for edgeless graphs.
    pub fn bandwidth_of_ordering(&self, ordering: &Ordering) -> Result<usize> {
        ordering.check_len(self.n())?;
        Ok(self.bandwidth_under(ordering.perm()))
    }

    pub(crate) fn bandwidth_under(&self, perm: &[usize]) -> usize {
        self.edges()
            .map(|(u, v)| perm[u].abs_diff(perm[v]))
            .max()
            .unwrap_or(0)
    }

    /// Bandwidth of the graph's own labeling.
    pub fn bandwidth(&self) -> usize {
        self.edges().map(|(u, v)| v - u).max().unwrap_or(0)
    }
}

/// How an [`Ordering`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderingFamily {
    Bfs,
    Dfs,
    Cm,
    Identity,
    Exact,
}

impl std::str::FromStr for OrderingFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bfs" => Ok(Self::Bfs),
            "dfs" => Ok(Self::Dfs),
            "cm" => Ok(Self::Cm),
            "identity" => Ok(Self::Identity),
            "exact" => Ok(Self::Exact),
            other => Err(Error::input(format!("unknown ordering family '{other}'"))),
        }
    }
}

impl std::fmt::Display for OrderingFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Bfs => "bfs",
            Self::Dfs => "dfs",
            Self::Cm => "cm",
            Self::Identity => "identity",
            Self::Exact => "exact",
        })
    }
}

/// A bijection from original node index to position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ordering {
    perm: Vec<usize>,
    family: OrderingFamily,
}

impl Ordering {
    pub fn new(perm: Vec<usize>, family: OrderingFamily) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::input("ordering is not a permutation"));
            }
        }
        Ok(Ordering { perm, family })
    }

    pub fn identity(n: usize) -> Self {
        Ordering {
            perm: (0..n).collect(),
            family: OrderingFamily::Identity,
        }
    }

    /// Builds an ordering from a visiting sequence: `sequence[k]` is the node
    /// placed at position `k`.
    pub fn from_sequence(sequence: &[usize], family: OrderingFamily) -> Result<Self> {
        let mut perm = vec![usize::MAX; sequence.len()];
        for (pos, &v) in sequence.iter().enumerate() {
            if v >= perm.len() || perm[v] != usize::MAX {
                return Err(Error::input("visiting sequence is not a permutation"));
            }
            perm[v] = pos;
        }
        Ok(Ordering { perm, family })
    }

    #[inline]
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn family(&self) -> OrderingFamily {
        self.family
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// Position → original node.
    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.perm.len()];
        for (v, &p) in self.perm.iter().enumerate() {
            inv[p] = v;
        }
        inv
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if self.perm.len() != n {
            return Err(Error::input(format!(
                "ordering has length {} but graph has {n} nodes",
                self.perm.len()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_from_edge_list() {
        let (g, stats) = Graph::from_edge_list(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(g, Graph::path(4));
        assert_eq!(stats, CleanStats::default());
    }

    #[test]
    fn duplicates_and_self_loops_are_dropped() {
        let (g, stats) = Graph::from_edge_list(3, &[(0, 1), (1, 0), (2, 2)]).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(stats.duplicates, 1);
        assert_eq!(stats.self_loops, 1);
    }

    #[test]
    fn out_of_range_is_input_error() {
        let err = Graph::from_edge_list(5, &[(0, 7)]).unwrap_err();
        assert_eq!(err.category(), crate::Category::Input);
        assert!(Graph::from_edge_list(0, &[]).is_err());
    }

    #[test]
    fn apply_ordering_relabels() {
        let p4 = Graph::path(4);
        assert_eq!(p4.apply_ordering(&Ordering::identity(4)).unwrap(), p4);
        let rev = Ordering::new(vec![3, 2, 1, 0], OrderingFamily::Identity).unwrap();
        assert_eq!(p4.apply_ordering(&rev).unwrap(), p4);

        let c6 = Graph::cycle(6);
        let o = Ordering::new(vec![4, 0, 5, 2, 1, 3], OrderingFamily::Identity).unwrap();
        let h = c6.apply_ordering(&o).unwrap();
        assert_eq!(h.degree_multiset(), vec![2; 6]);
        assert_eq!(h.edge_count(), 6);
        // node i of h is node perm⁻¹(i) of c6
        let inv = o.inverse();
        for (u, v) in c6.edges() {
            assert!(h.has_edge(o.perm()[u], o.perm()[v]));
        }
        assert_eq!(inv[4], 0);
    }

    #[test]
    fn apply_ordering_length_mismatch() {
        assert!(Graph::path(4).apply_ordering(&Ordering::identity(3)).is_err());
        assert!(Graph::path(4).bandwidth_of_ordering(&Ordering::identity(5)).is_err());
    }

    #[test]
    fn ordering_bandwidths() {
        let id = |n| Ordering::identity(n);
        assert_eq!(Graph::path(4).bandwidth_of_ordering(&id(4)).unwrap(), 1);
        assert_eq!(Graph::cycle(6).bandwidth_of_ordering(&id(6)).unwrap(), 5);
        let k4 = Graph::complete(4);
        let o = Ordering::new(vec![2, 0, 3, 1], OrderingFamily::Identity).unwrap();
        assert_eq!(k4.bandwidth_of_ordering(&o).unwrap(), 3);
        assert_eq!(Graph::empty(5).bandwidth_of_ordering(&id(5)).unwrap(), 0);
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(Ordering::new(vec![0, 0, 1], OrderingFamily::Identity).is_err());
        assert!(Ordering::new(vec![0, 3, 1], OrderingFamily::Identity).is_err());
        assert!(Ordering::from_sequence(&[1, 1], OrderingFamily::Bfs).is_err());
    }

    #[test]
    fn largest_component_prefers_size_then_index() {
        let g = Graph::from_edges(7, &[(0, 1), (2, 3), (3, 4), (5, 6)]);
        let lcc = g.largest_component();
        assert_eq!(lcc, Graph::path(3));
        let tie = Graph::from_edges(4, &[(0, 1), (2, 3)]);
        assert_eq!(tie.largest_component(), Graph::path(2));
    }

    #[test]
    fn grid_counts() {
        let g = Graph::grid(10, 10);
        assert_eq!(g.n(), 100);
        assert_eq!(g.edge_count(), 180);
        assert_eq!(Graph::grid(3, 4).edge_count(), 17);
    }
}
