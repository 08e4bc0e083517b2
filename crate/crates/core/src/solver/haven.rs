//! Havens: closed forms for complete graphs and square grids, exhaustive search for tiny graphs.

use std::collections::{BTreeMap, BTreeSet};

use super::SolverError;
use crate::graph::families::square_grid;
use crate::graph::{Graph, Vertex};

pub const HAVEN_SEARCH_LIMIT: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HavenKind {
    /// `beta(X) = V - X`.
    Complete,
    /// Component holding the untouched rows of an `n x n` grid.
    Grid { side: usize },
    /// Explicit component per subset.
    Table(BTreeMap<Vec<Vertex>, Vec<Vertex>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Haven {
    pub order: usize,
    pub kind: HavenKind,
}

/// Connected components of `g - removed`, each sorted, in order of least vertex.
pub fn components_without(g: &Graph, removed: &[Vertex]) -> Vec<Vec<Vertex>> {
    let mut gone = vec![false; g.n()];
    for &v in removed {
        gone[v] = true;
    }
    let mut seen = gone.clone();
    let mut out = Vec::new();
    for s in 0..g.n() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            for &w in g.adj(comp[i]) {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
            i += 1;
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Whether two vertex sets share a vertex or are joined by an edge.
pub fn touch(g: &Graph, a: &[Vertex], b: &[Vertex]) -> bool {
    let bs: BTreeSet<Vertex> = b.iter().copied().collect();
    a.iter().any(|v| bs.contains(v) || g.adj(*v).iter().any(|w| bs.contains(w)))
}

impl Haven {
    /// Component chosen for `x`, or `None` when `|x|` is not below the order.
    pub fn beta(&self, g: &Graph, x: &[Vertex]) -> Option<Vec<Vertex>> {
        let mut key = x.to_vec();
        key.sort_unstable();
        key.dedup();
        if key.len() >= self.order {
            return None;
        }
        match &self.kind {
            HavenKind::Complete => Some((0..g.n()).filter(|v| key.binary_search(v).is_err()).collect()),
            HavenKind::Grid { side } => {
                let row = (0..*side).find(|r| (0..*side).all(|c| key.binary_search(&(r * side + c)).is_err()))?;
                components_without(g, &key).into_iter().find(|c| c.contains(&(row * side)))
            }
            HavenKind::Table(map) => map.get(&key).cloned(),
        }
    }

    /// Checks touching on every pair and monotonicity on every nested pair of subsets
    /// with fewer than `order` vertices, up to `limit` subsets.
    pub fn verify(&self, g: &Graph, limit: usize) -> Result<usize, String> {
        let sets = subsets_below(g.n(), self.order, limit).ok_or("too many subsets to verify")?;
        let images: Vec<Vec<Vertex>> = sets
            .iter()
            .map(|x| self.beta(g, x).ok_or_else(|| format!("no component for {:?}", x)))
            .collect::<Result<_, _>>()?;
        for (x, img) in sets.iter().zip(&images) {
            if img.is_empty() || img.iter().any(|v| x.contains(v)) || !components_without(g, x).contains(img) {
                return Err(format!("beta({:?}) = {:?} is not a component of the complement", x, img));
            }
        }
        for i in 0..sets.len() {
            for j in i..sets.len() {
                if !touch(g, &images[i], &images[j]) {
                    return Err(format!("beta({:?}) and beta({:?}) do not touch", sets[i], sets[j]));
                }
                let (a, b) = (&sets[i], &sets[j]);
                if a.iter().all(|v| b.contains(v)) && !images[j].iter().all(|v| images[i].contains(v)) {
                    return Err(format!("beta({:?}) not inside beta({:?})", b, a));
                }
            }
        }
        Ok(sets.len())
    }
}

fn subsets_below(n: usize, order: usize, limit: usize) -> Option<Vec<Vec<Vertex>>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 1..order {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map_or(0, |&v: &Vertex| v + 1);
            for v in start..n {
                let mut t = s.clone();
                t.push(v);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        if out.len() > limit {
            return None;
        }
        frontier = next;
    }
    Some(out)
}

fn is_complete(g: &Graph) -> bool {
    (0..g.n()).all(|v| g.degree(v) + 1 == g.n())
}

fn square_side(g: &Graph) -> Option<usize> {
    let side = (1..=g.n()).find(|s| s * s >= g.n())?;
    if side * side != g.n() || side < 2 {
        return None;
    }
    let reference = square_grid(side, side).ok()?;
    (reference.edges() == g.edges()).then_some(side)
}

/// A haven of order `k` in `g`, if one exists.
pub fn haven_of_order(g: &Graph, k: usize) -> Result<Option<Haven>, SolverError> {
    if k == 0 {
        return Ok(Some(Haven { order: 0, kind: HavenKind::Table(BTreeMap::new()) }));
    }
    if is_complete(g) {
        return Ok((k <= g.n()).then_some(Haven { order: k, kind: HavenKind::Complete }));
    }
    if let Some(side) = square_side(g) {
        if k <= side {
            return Ok(Some(Haven { order: k, kind: HavenKind::Grid { side } }));
        }
    }
    if g.n() > HAVEN_SEARCH_LIMIT {
        return Err(SolverError::TooLarge { n: g.n(), limit: HAVEN_SEARCH_LIMIT });
    }
    if k > g.n() {
        return Ok(None);
    }
    let sets = subsets_below(g.n(), k, usize::MAX).unwrap();
    let mut chosen: Vec<Vec<Vertex>> = Vec::with_capacity(sets.len());
    let index: BTreeMap<Vec<Vertex>, usize> = sets.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    if search(g, &sets, &index, &mut chosen) {
        let map = sets.into_iter().zip(chosen).collect();
        Ok(Some(Haven { order: k, kind: HavenKind::Table(map) }))
    } else {
        Ok(None)
    }
}

/// Assigns components in order of subset size; each must lie inside the component chosen
/// for every subset with one vertex fewer, and touch every earlier choice.
fn search(g: &Graph, sets: &[Vec<Vertex>], index: &BTreeMap<Vec<Vertex>, usize>, chosen: &mut Vec<Vec<Vertex>>) -> bool {
    let i = chosen.len();
    if i == sets.len() {
        return true;
    }
    let x = &sets[i];
    let parents: Vec<usize> = (0..x.len())
        .map(|j| {
            let mut p = x.clone();
            p.remove(j);
            index[&p]
        })
        .collect();
    for comp in components_without(g, x) {
        if parents.iter().any(|&p| !comp.iter().all(|v| chosen[p].binary_search(v).is_ok())) {
            continue;
        }
        if chosen.iter().any(|c| !touch(g, c, &comp)) {
            continue;
        }
        chosen.push(comp);
        if search(g, sets, index, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::{complete, path};

    #[test]
    fn complete_graph_orders() {
        let k4 = complete(4).unwrap();
        assert!(haven_of_order(&k4, 4).unwrap().is_some());
        assert!(haven_of_order(&k4, 5).unwrap().is_none());
        let k1 = complete(1).unwrap();
        let h = haven_of_order(&k1, 1).unwrap().unwrap();
        assert_eq!(h.beta(&k1, &[]), Some(vec![0]));
    }

    #[test]
    fn grid_haven_touches() {
        let g = square_grid(3, 3).unwrap();
        let h = haven_of_order(&g, 3).unwrap().unwrap();
        assert_eq!(h.verify(&g, 1000).unwrap(), 1 + 9 + 36);
    }

    #[test]
    fn path_has_order_two_only() {
        let g = path(5).unwrap();
        let h = haven_of_order(&g, 2).unwrap().unwrap();
        h.verify(&g, 1000).unwrap();
        assert!(haven_of_order(&g, 3).unwrap().is_none());
    }
}
