//! Per-node orbit counts of connected induced graphlets on 2 to 4 nodes.
//!
//! Orbit numbering:
//!
//! | orbit | graphlet        | node position          |
//! |-------|-----------------|------------------------|
//! | 0     | edge            | endpoint               |
//! | 1, 2  | path on 3       | end, middle            |
//! | 3     | triangle        | any                    |
//! | 4, 5  | path on 4       | end, interior          |
//! | 6, 7  | star on 4       | leaf, center           |
//! | 8     | 4-cycle         | any                    |
//! | 9–11  | tailed triangle | tail end, degree 2, degree 3 |
//! | 12, 13| diamond         | degree 2, degree 3     |
//! | 14    | K4              | any                    |

use crate::graph::Graph;

pub const ORBITS: usize = 15;

/// `counts[v][o]` is the number of induced graphlets in which `v` occupies
/// orbit `o`.
pub fn orbit_counts4(g: &Graph) -> Vec<[u64; ORBITS]> {
    let mut counts = vec![[0u64; ORBITS]; g.n()];
    let mut sub = Vec::with_capacity(4);
    for v in 0..g.n() {
        let ext: Vec<usize> = g.neighbors(v).iter().copied().filter(|&u| u > v).collect();
        sub.push(v);
        extend(g, &mut sub, ext, v, &mut counts);
        sub.pop();
    }
    counts
}

/// Mean orbit vector over nodes.
pub fn orbit_mean(g: &Graph) -> Vec<f64> {
    let counts = orbit_counts4(g);
    let mut mean = vec![0.0; ORBITS];
    if counts.is_empty() {
        return mean;
    }
    for row in &counts {
        for (m, &c) in mean.iter_mut().zip(row) {
            *m += c as f64;
        }
    }
    let n = counts.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    mean
}

// ESU: every connected subset is reached exactly once, rooted at its minimum.
fn extend(g: &Graph, sub: &mut Vec<usize>, mut ext: Vec<usize>, root: usize, counts: &mut [[u64; ORBITS]]) {
    if sub.len() >= 2 {
        record(g, sub, counts);
    }
    if sub.len() == 4 {
        return;
    }
    while let Some(w) = ext.pop() {
        let mut next = ext.clone();
        for &u in g.neighbors(w) {
            if u <= root || sub.contains(&u) || next.contains(&u) || u == w {
                continue;
            }
            if sub.iter().any(|&s| g.has_edge(s, u)) {
                continue;
            }
            next.push(u);
        }
        sub.push(w);
        extend(g, sub, next, root, counts);
        sub.pop();
    }
}

fn record(g: &Graph, sub: &[usize], counts: &mut [[u64; ORBITS]]) {
    let k = sub.len();
    let mut deg = [0usize; 4];
    let mut edges = 0;
    for i in 0..k {
        for j in i + 1..k {
            if g.has_edge(sub[i], sub[j]) {
                deg[i] += 1;
                deg[j] += 1;
                edges += 1;
            }
        }
    }
    for i in 0..k {
        let orbit = match (k, edges, deg[i]) {
            (2, _, _) => 0,
            (3, 2, 1) => 1,
            (3, 2, _) => 2,
            (3, _, _) => 3,
            (4, 3, d) => {
                if deg[..4].contains(&3) {
                    if d == 3 { 7 } else { 6 }
                } else if d == 1 {
                    4
                } else {
                    5
                }
            }
            (4, 4, d) => {
                if deg[..4].contains(&3) {
                    match d {
                        1 => 9,
                        2 => 10,
                        _ => 11,
                    }
                } else {
                    8
                }
            }
            (4, 5, 2) => 12,
            (4, 5, _) => 13,
            _ => 14,
        };
        counts[sub[i]][orbit] += 1;
    }
}
