//! Node orderings: breadth/depth-first, Cuthill-McKee from a pseudo-peripheral
//! root, and an exact branch-and-bound bandwidth solver for small graphs.
//!
//! Disconnected graphs are ordered one component at a time, components taken
//! in order of their smallest node index.

use std::collections::VecDeque;

use rand::seq::{IndexedRandom, SliceRandom};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Ordering, OrderingFamily};
use crate::rng::{self, Rng};

/// Largest graph [`exact_bandwidth`] accepts.
pub const EXACT_MAX_NODES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Fully deterministic: lowest degree first, then lowest index.
    DegreeThenIndex,
    /// Equal-degree neighbors are visited in a seeded random order and the
    /// root search starts from a seeded random node.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderingConfig {
    pub family: OrderingFamily,
    pub seed: u64,
    pub tie_break: TieBreak,
}

impl Default for OrderingConfig {
    fn default() -> Self {
        OrderingConfig {
            family: OrderingFamily::Cm,
            seed: 0,
            tie_break: TieBreak::Random,
        }
    }
}

impl OrderingConfig {
    pub fn new(family: OrderingFamily, seed: u64) -> Self {
        OrderingConfig {
            family,
            seed,
            tie_break: TieBreak::Random,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        OrderingConfig { seed, ..self }
    }
}

/// Orders `graph` with the family selected in `cfg`.
pub fn order(graph: &Graph, cfg: &OrderingConfig) -> Result<Ordering> {
    match cfg.family {
        OrderingFamily::Cm => Ok(cuthill_mckee(graph, cfg)),
        OrderingFamily::Bfs => Ok(bfs_order(graph, cfg)),
        OrderingFamily::Dfs => Ok(dfs_order(graph, cfg)),
        OrderingFamily::Identity => Ok(Ordering::identity(graph.n())),
        OrderingFamily::Exact => exact_ordering(graph),
    }
}

/// Nodes grouped by BFS distance from `root` (its component only).
pub fn level_structure(graph: &Graph, root: usize) -> Vec<Vec<usize>> {
    let dist = graph.bfs_distances(root);
    let depth = dist.iter().filter(|&&d| d != usize::MAX).max().copied().unwrap_or(0);
    let mut levels = vec![Vec::new(); depth + 1];
    for (v, &d) in dist.iter().enumerate() {
        if d != usize::MAX {
            levels[d].push(v);
        }
    }
    levels
}

/// George–Liu iteration from `start`, restricted to the component of `start`.
fn pseudo_peripheral_from(graph: &Graph, start: usize) -> usize {
    let mut levels = level_structure(graph, start);
    loop {
        let ecc = levels.len() - 1;
        let candidate = *levels[ecc]
            .iter()
            .min_by_key(|&&v| (graph.degree(v), v))
            .expect("deepest level is non-empty");
        let cand_levels = level_structure(graph, candidate);
        if cand_levels.len() - 1 > ecc {
            levels = cand_levels;
        } else {
            return candidate;
        }
    }
}

/// A node of near-maximal eccentricity in a connected graph, found by the
/// George–Liu iteration from a seeded random start node.
pub fn pseudo_peripheral_node(graph: &Graph, seed: u64) -> Result<usize> {
    if !graph.is_connected() {
        return Err(Error::input(
            "pseudo-peripheral search needs a connected graph; order per component",
        ));
    }
    let start = {
        use rand::Rng as _;
        rng::seeded(seed).random_range(0..graph.n())
    };
    Ok(pseudo_peripheral_from(graph, start))
}

fn cm_start(graph: &Graph, comp: &[usize], cfg: &OrderingConfig, rng: &mut Rng) -> usize {
    match cfg.tie_break {
        TieBreak::DegreeThenIndex => *comp
            .iter()
            .min_by_key(|&&v| (graph.degree(v), v))
            .expect("component is non-empty"),
        TieBreak::Random => *comp.choose(rng).expect("component is non-empty"),
    }
}

/// Cuthill-McKee: breadth-first from a pseudo-peripheral root, enqueueing the
/// unvisited neighbors of each node in ascending degree.
///
/// The George–Liu root and every node in the deepest level of its level
/// structure are all tried as roots; the narrowest ordering wins, earlier
/// candidates on ties.
pub fn cuthill_mckee(graph: &Graph, cfg: &OrderingConfig) -> Ordering {
    let mut rng = rng::seeded(cfg.seed);
    let mut pos = vec![usize::MAX; graph.n()];
    let mut sequence = Vec::with_capacity(graph.n());
    let mut frontier = Vec::new();
    for comp in graph.components() {
        let start = cm_start(graph, &comp, cfg, &mut rng);
        let root = pseudo_peripheral_from(graph, start);
        let deepest = level_structure(graph, root).pop().expect("root has a level");
        let mut best: Option<(usize, Vec<usize>)> = None;
        for cand in std::iter::once(root).chain(deepest.into_iter().filter(|&v| v != root)) {
            let order = cm_component(graph, cand, comp.len(), cfg, &mut rng, &mut frontier, &mut pos);
            let width = graph
                .edges()
                .filter(|&(u, _)| pos[u] != usize::MAX)
                .map(|(u, v)| pos[u].abs_diff(pos[v]))
                .max()
                .unwrap_or(0);
            for &v in &order {
                pos[v] = usize::MAX;
            }
            if best.as_ref().is_none_or(|(w, _)| width < *w) {
                best = Some((width, order));
            }
        }
        sequence.extend(best.expect("at least the root is tried").1);
    }
    Ordering::from_sequence(&sequence, OrderingFamily::Cm).expect("BFS visits every node once")
}

/// One Cuthill-McKee sweep of the component containing `root`. Leaves each
/// visited node's local position in `pos`; the caller resets it.
fn cm_component(
    graph: &Graph,
    root: usize,
    size: usize,
    cfg: &OrderingConfig,
    rng: &mut Rng,
    frontier: &mut Vec<usize>,
    pos: &mut [usize],
) -> Vec<usize> {
    let mut order = Vec::with_capacity(size);
    let mut queue = VecDeque::from([root]);
    pos[root] = 0;
    while let Some(u) = queue.pop_front() {
        order.push(u);
        frontier.clear();
        frontier.extend(graph.neighbors(u).iter().copied().filter(|&v| pos[v] == usize::MAX));
        match cfg.tie_break {
            TieBreak::DegreeThenIndex => {
                frontier.sort_unstable_by_key(|&v| (graph.degree(v), v));
            }
            TieBreak::Random => {
                frontier.shuffle(rng);
                frontier.sort_by_key(|&v| graph.degree(v));
            }
        }
        for &v in frontier.iter() {
            pos[v] = order.len() + queue.len();
            queue.push_back(v);
        }
    }
    order
}

fn pick_root(comp: &[usize], cfg: &OrderingConfig, rng: &mut Rng) -> usize {
    match cfg.tie_break {
        TieBreak::DegreeThenIndex => comp[0],
        TieBreak::Random => *comp.choose(rng).expect("component is non-empty"),
    }
}

fn neighbor_order(graph: &Graph, v: usize, cfg: &OrderingConfig, rng: &mut Rng) -> Vec<usize> {
    let mut nbrs = graph.neighbors(v).to_vec();
    if cfg.tie_break == TieBreak::Random {
        nbrs.shuffle(rng);
    }
    nbrs
}

fn bfs_component(
    graph: &Graph,
    root: usize,
    cfg: &OrderingConfig,
    rng: &mut Rng,
    visited: &mut [bool],
    sequence: &mut Vec<usize>,
) {
    let mut queue = VecDeque::from([root]);
    visited[root] = true;
    while let Some(u) = queue.pop_front() {
        sequence.push(u);
        for v in neighbor_order(graph, u, cfg, rng) {
            if !visited[v] {
                visited[v] = true;
                queue.push_back(v);
            }
        }
    }
}

/// Breadth-first ordering with a seeded random root per component and seeded
/// random neighbor order.
pub fn bfs_order(graph: &Graph, cfg: &OrderingConfig) -> Ordering {
    let mut rng = rng::seeded(cfg.seed);
    let mut visited = vec![false; graph.n()];
    let mut sequence = Vec::with_capacity(graph.n());
    for comp in graph.components() {
        let root = pick_root(&comp, cfg, &mut rng);
        bfs_component(graph, root, cfg, &mut rng, &mut visited, &mut sequence);
    }
    Ordering::from_sequence(&sequence, OrderingFamily::Bfs).expect("BFS visits every node once")
}

/// Breadth-first ordering of a connected graph from a fixed root.
pub fn bfs_rooted(graph: &Graph, root: usize, cfg: &OrderingConfig) -> Result<Ordering> {
    if root >= graph.n() {
        return Err(Error::input(format!("root {root} out of range")));
    }
    if !graph.is_connected() {
        return Err(Error::input("rooted BFS needs a connected graph"));
    }
    let mut rng = rng::seeded(cfg.seed);
    let mut visited = vec![false; graph.n()];
    let mut sequence = Vec::with_capacity(graph.n());
    bfs_component(graph, root, cfg, &mut rng, &mut visited, &mut sequence);
    Ordering::from_sequence(&sequence, OrderingFamily::Bfs)
}

/// Depth-first preorder with a seeded random root per component and seeded
/// random neighbor order.
pub fn dfs_order(graph: &Graph, cfg: &OrderingConfig) -> Ordering {
    let mut rng = rng::seeded(cfg.seed);
    let mut visited = vec![false; graph.n()];
    let mut sequence = Vec::with_capacity(graph.n());
    for comp in graph.components() {
        let root = pick_root(&comp, cfg, &mut rng);
        visited[root] = true;
        sequence.push(root);
        let mut stack = vec![(neighbor_order(graph, root, cfg, &mut rng), 0usize)];
        while let Some((nbrs, next)) = stack.last_mut() {
            if *next == nbrs.len() {
                stack.pop();
                continue;
            }
            let v = nbrs[*next];
            *next += 1;
            if !visited[v] {
                visited[v] = true;
                sequence.push(v);
                let order = neighbor_order(graph, v, cfg, &mut rng);
                stack.push((order, 0));
            }
        }
    }
    Ordering::from_sequence(&sequence, OrderingFamily::Dfs).expect("DFS visits every node once")
}

/// The graph bandwidth: the minimum over all orderings of the maximum edge
/// stretch. Exponential; refuses graphs above [`EXACT_MAX_NODES`].
pub fn exact_bandwidth(graph: &Graph) -> Result<usize> {
    let o = exact_ordering(graph)?;
    Ok(graph.bandwidth_under(o.perm()))
}

/// An ordering that attains the graph bandwidth.
pub fn exact_ordering(graph: &Graph) -> Result<Ordering> {
    exact_ordering_within(graph, EXACT_MAX_NODES)
}

/// [`exact_bandwidth`] with a caller-chosen size cap, for sparse graphs a
/// little past the default where the search still finishes quickly.
pub fn exact_bandwidth_within(graph: &Graph, max_nodes: usize) -> Result<usize> {
    let o = exact_ordering_within(graph, max_nodes)?;
    Ok(graph.bandwidth_under(o.perm()))
}

fn exact_ordering_within(graph: &Graph, max_nodes: usize) -> Result<Ordering> {
    let n = graph.n();
    if n > max_nodes {
        return Err(Error::Capability(format!(
            "exact bandwidth is limited to {max_nodes} nodes, graph has {n}"
        )));
    }
    if graph.edge_count() == 0 {
        return Ordering::new((0..n).collect(), OrderingFamily::Exact);
    }
    // each node needs ⌈deg/2⌉ slots on at least one side
    let lower = (0..n).map(|v| graph.degree(v).div_ceil(2)).max().unwrap_or(0).max(1);
    for k in lower..n {
        let mut search = BandSearch::new(graph, k);
        if search.run() {
            return Ordering::from_sequence(&search.sequence, OrderingFamily::Exact);
        }
    }
    unreachable!("width n-1 is always feasible")
}

/// Depth-first placement of nodes into positions 0, 1, … such that no edge
/// exceeds stretch `k`.
struct BandSearch<'a> {
    graph: &'a Graph,
    k: usize,
    pos: Vec<usize>,
    /// Unplaced neighbors per node.
    open: Vec<usize>,
    sequence: Vec<usize>,
}

impl<'a> BandSearch<'a> {
    fn new(graph: &'a Graph, k: usize) -> Self {
        BandSearch {
            graph,
            k,
            pos: vec![usize::MAX; graph.n()],
            open: (0..graph.n()).map(|v| graph.degree(v)).collect(),
            sequence: Vec::with_capacity(graph.n()),
        }
    }

    fn run(&mut self) -> bool {
        let n = self.graph.n();
        let p = self.sequence.len();
        if p == n {
            return true;
        }
        for v in 0..n {
            if self.pos[v] != usize::MAX || !self.placeable(v, p) {
                continue;
            }
            self.place(v, p);
            if self.window_ok(p) && self.run() {
                return true;
            }
            self.unplace(v);
        }
        false
    }

    fn placeable(&self, v: usize, p: usize) -> bool {
        self.graph
            .neighbors(v)
            .iter()
            .all(|&w| self.pos[w] == usize::MAX || p - self.pos[w] <= self.k)
    }

    /// Every placed node at position `q` still needs its open neighbors to
    /// fit in positions `p+1 ..= q+k`.
    fn window_ok(&self, p: usize) -> bool {
        let lo = p.saturating_sub(self.k);
        self.sequence[lo..=p]
            .iter()
            .all(|&u| self.open[u] <= self.pos[u] + self.k - p)
            && (p < self.k + 1 || self.open[self.sequence[p - self.k - 1]] == 0)
    }

    fn place(&mut self, v: usize, p: usize) {
        self.pos[v] = p;
        self.sequence.push(v);
        for &w in self.graph.neighbors(v) {
            self.open[w] -= 1;
        }
    }

    fn unplace(&mut self, v: usize) {
        self.pos[v] = usize::MAX;
        self.sequence.pop();
        for &w in self.graph.neighbors(v) {
            self.open[w] += 1;
        }
    }
}
