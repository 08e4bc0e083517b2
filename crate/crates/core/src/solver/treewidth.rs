//! Exact treewidth by dynamic programming over vertex subsets.

use super::SolverError;
use crate::graph::TreeDecomposition;
use crate::graph::{Graph, Vertex};

pub const TREEWIDTH_LIMIT: usize = 12;

/// Vertices outside `s | {v}` reachable from `v` through paths with interior in `s`.
fn q_set(g: &Graph, s: u32, v: Vertex) -> u32 {
    let mut seen = 1u32 << v;
    let mut stack = vec![v];
    let mut out = 0u32;
    while let Some(u) = stack.pop() {
        for &w in g.adj(u) {
            let bit = 1u32 << w;
            if seen & bit != 0 {
                continue;
            }
            seen |= bit;
            if s & bit != 0 {
                stack.push(w);
            } else {
                out |= bit;
            }
        }
    }
    out
}

/// Treewidth and an optimal decomposition, for graphs with at most 12 vertices.
pub fn treewidth_exact(g: &Graph) -> Result<(usize, TreeDecomposition), SolverError> {
    let n = g.n();
    if n > TREEWIDTH_LIMIT {
        return Err(SolverError::TooLarge { n, limit: TREEWIDTH_LIMIT });
    }
    let full = (1u32 << n) - 1;
    // best[s]: least possible max |Q| when the vertices of s are eliminated first.
    let mut best = vec![i32::MAX; 1 << n];
    let mut last = vec![usize::MAX; 1 << n];
    best[0] = -1;
    for s in 1..=full {
        for v in 0..n {
            if s & (1 << v) == 0 {
                continue;
            }
            let rest = s & !(1 << v);
            let q = q_set(g, rest, v).count_ones() as i32;
            let val = best[rest as usize].max(q);
            if val < best[s as usize] {
                best[s as usize] = val;
                last[s as usize] = v;
            }
        }
    }
    let width = best[full as usize].max(0) as usize;
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = last[s as usize];
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    let decomp = from_elimination_order(g, &order);
    Ok((width, decomp))
}

/// Decomposition induced by eliminating vertices in `order`.
pub fn from_elimination_order(g: &Graph, order: &[Vertex]) -> TreeDecomposition {
    let n = g.n();
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut adj: Vec<std::collections::BTreeSet<Vertex>> = (0..n).map(|v| g.adj(v).iter().copied().collect()).collect();
    let mut bags = Vec::with_capacity(n);
    let mut later = Vec::with_capacity(n);
    for &v in order {
        let nb: Vec<Vertex> = adj[v].iter().copied().filter(|&w| pos[w] > pos[v]).collect();
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        let mut bag = nb.clone();
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
        later.push(nb);
    }
    let mut edges = Vec::new();
    for i in 0..n {
        if i + 1 == n {
            break;
        }
        let parent = later[i].iter().map(|&w| pos[w]).min().unwrap_or(i + 1);
        edges.push((i, parent));
    }
    TreeDecomposition { bags, edges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::{complete, cycle, path, square_grid};

    #[test]
    fn known_widths() {
        for (g, w) in [
            (complete(4).unwrap(), 3),
            (path(6).unwrap(), 1),
            (square_grid(3, 3).unwrap(), 3),
            (cycle(7).unwrap(), 2),
            (complete(1).unwrap(), 0),
        ] {
            let (width, d) = treewidth_exact(&g).unwrap();
            assert_eq!(width, w);
            d.validate(&g).unwrap();
            assert_eq!(d.width(), w);
        }
    }
}
