//! Slim-triangle hyperbolicity by explicit geodesic enumeration.

use crate::graph::{Graph, Vertex};

/// Result of a slimness computation. When some pair has more geodesics than the budget,
/// `lower` comes from the enumerated ones and `upper` from the half-side bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlimDelta {
    pub lower: usize,
    pub upper: usize,
    pub exact: bool,
    /// Vertex pairs whose geodesics were not all enumerated.
    pub truncated_pairs: usize,
    /// A triangle attaining `lower`.
    pub witness: Option<GeodesicTriangle>,
}

impl SlimDelta {
    pub fn value(&self) -> Option<usize> {
        self.exact.then_some(self.lower)
    }
}

/// Three geodesics `x-y`, `y-z`, `z-x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeodesicTriangle {
    pub sides: [Vec<Vertex>; 3],
    pub slimness: usize,
}

impl GeodesicTriangle {
    /// Recomputes the slimness from the explicit sides with fresh BFS distances.
    pub fn recheck(&self, g: &Graph) -> Option<usize> {
        for s in &self.sides {
            let from = g.distance_field(&s[..1], usize::MAX);
            if !g.is_walk(s) || from[s[s.len() - 1]]? != s.len() - 1 {
                return None;
            }
        }
        let mut worst = 0;
        for i in 0..3 {
            let others: Vec<Vertex> = self.sides[(i + 1) % 3].iter().chain(&self.sides[(i + 2) % 3]).copied().collect();
            let field = g.distance_field(&others, usize::MAX);
            for &p in &self.sides[i] {
                worst = worst.max(field[p]?);
            }
        }
        Some(worst)
    }
}

struct Metric {
    n: usize,
    d: Vec<u32>,
}

impl Metric {
    fn new(g: &Graph) -> Self {
        let n = g.n();
        let mut d = vec![u32::MAX; n * n];
        for s in 0..n {
            for (v, x) in g.distance_field(&[s], usize::MAX).into_iter().enumerate() {
                if let Some(x) = x {
                    d[s * n + v] = x as u32;
                }
            }
        }
        Metric { n, d }
    }

    fn get(&self, a: Vertex, b: Vertex) -> usize {
        self.d[a * self.n + b] as usize
    }
}

/// Geodesics from `a` to `b`, at most `budget` of them, and whether that was all.
fn geodesics(g: &Graph, m: &Metric, a: Vertex, b: Vertex, budget: usize) -> (Vec<Vec<Vertex>>, bool) {
    let mut out = Vec::new();
    let mut stack = vec![vec![a]];
    while let Some(p) = stack.pop() {
        let last = *p.last().unwrap();
        if last == b {
            if out.len() == budget {
                return (out, false);
            }
            out.push(p);
            continue;
        }
        let rest = m.get(last, b);
        for &w in g.adj(last).iter().rev() {
            if m.get(w, b) + 1 == rest {
                let mut q = p.clone();
                q.push(w);
                stack.push(q);
            }
        }
    }
    (out, true)
}

fn dist_to_path(m: &Metric, p: Vertex, path: &[Vertex]) -> usize {
    path.iter().map(|&q| m.get(p, q)).min().unwrap_or(usize::MAX)
}

/// Slimness defect of the worst geodesic triangle, over all vertex triples (repeats allowed).
pub fn delta_hyperbolicity_slim(g: &Graph, geodesic_budget: usize) -> SlimDelta {
    let n = g.n();
    let m = Metric::new(g);
    let budget = geodesic_budget.max(1);
    let mut geo: Vec<Vec<Vec<Vertex>>> = vec![Vec::new(); n * n];
    let mut truncated = 0;
    for a in 0..n {
        for b in a..n {
            let (list, complete) = geodesics(g, &m, a, b, budget);
            truncated += usize::from(!complete);
            geo[a * n + b] = list;
        }
    }
    let list = |a: Vertex, b: Vertex| -> Vec<Vec<Vertex>> {
        let (lo, hi, rev) = if a <= b { (a, b, false) } else { (b, a, true) };
        let l = geo[lo * n + hi].clone();
        if rev {
            l.into_iter().map(|mut p| {
                p.reverse();
                p
            }).collect()
        } else {
            l
        }
    };
    let mut lower = 0;
    let mut witness = None;
    let mut upper = 0;
    for x in 0..n {
        for y in x..n {
            for z in y..n {
                let corners = [x, y, z];
                for i in 0..3 {
                    let (a, b, c) = (corners[i], corners[(i + 1) % 3], corners[(i + 2) % 3]);
                    upper = upper.max(m.get(a, b) / 2);
                    let side = list(a, b);
                    let left = list(b, c);
                    let right = list(c, a);
                    for s in &side {
                        for &p in s {
                            let (bl, l) = left.iter().map(|q| (dist_to_path(&m, p, q), q)).max_by_key(|t| t.0).unwrap();
                            let (br, r) = right.iter().map(|q| (dist_to_path(&m, p, q), q)).max_by_key(|t| t.0).unwrap();
                            let v = bl.min(br);
                            if v > lower || witness.is_none() {
                                lower = lower.max(v);
                                let mut sides = [s.clone(), l.clone(), r.clone()];
                                sides.rotate_right(i);
                                witness = Some(GeodesicTriangle { sides, slimness: v });
                            }
                        }
                    }
                }
            }
        }
    }
    if truncated == 0 {
        upper = lower;
    }
    if let Some(w) = witness.as_mut() {
        w.slimness = w.recheck(g).unwrap_or(w.slimness);
    }
    SlimDelta { lower, upper: upper.max(lower), exact: truncated == 0, truncated_pairs: truncated, witness }
}

/// Every geodesic triangle on every vertex triple, with its slimness. Intended for small graphs.
pub fn geodesic_triangles(g: &Graph, geodesic_budget: usize) -> Option<Vec<GeodesicTriangle>> {
    let n = g.n();
    let m = Metric::new(g);
    let mut out = Vec::new();
    for x in 0..n {
        for y in x..n {
            for z in y..n {
                let all = |a, b| {
                    let (l, complete) = geodesics(g, &m, a, b, geodesic_budget);
                    complete.then_some(l)
                };
                let xy = all(x, y)?;
                let yz = all(y, z)?;
                let zx = all(z, x)?;
                for a in &xy {
                    for b in &yz {
                        for c in &zx {
                            let sides = [a.clone(), b.clone(), c.clone()];
                            let mut worst = 0;
                            for i in 0..3 {
                                for &p in &sides[i] {
                                    let d = dist_to_path(&m, p, &sides[(i + 1) % 3]).min(dist_to_path(&m, p, &sides[(i + 2) % 3]));
                                    worst = worst.max(d);
                                }
                            }
                            out.push(GeodesicTriangle { sides, slimness: worst });
                        }
                    }
                }
            }
        }
    }
    Some(out)
}
