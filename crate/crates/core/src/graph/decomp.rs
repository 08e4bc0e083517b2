use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use super::{Graph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompError {
    #[error("decomposition tree is not a tree on {0} nodes")]
    NotATree(usize),
    #[error("vertex {0} is in no bag")]
    UncoveredVertex(Vertex),
    #[error("edge {0}-{1} is in no bag")]
    UncoveredEdge(Vertex, Vertex),
    #[error("bags containing vertex {0} are not connected in the tree")]
    Disconnected(Vertex),
    #[error("bag {0} names a vertex outside the graph")]
    BadBag(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A tree-decomposition: bags indexed by tree nodes plus the tree edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<Vertex>>,
    pub edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    /// `bag <i>: <vertices>` lines followed by `tree <a> <b>` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, b) in self.bags.iter().enumerate() {
            let vs: Vec<String> = b.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!("bag {}: {}\n", i, vs.join(" ")));
        }
        for (a, b) in &self.edges {
            out.push_str(&format!("tree {} {}\n", a, b));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, DecompError> {
        let mut bags: Vec<(usize, Vec<Vertex>)> = Vec::new();
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| DecompError::Parse { line: i + 1, msg };
            let ids = |t: &str| -> Result<Vec<usize>, DecompError> {
                t.split_whitespace().map(|x| x.parse().map_err(|_| err(format!("bad id {:?}", x)))).collect()
            };
            if let Some(rest) = line.strip_prefix("bag ") {
                let (k, vs) = rest.split_once(':').ok_or_else(|| err("missing ':'".into()))?;
                let k = ids(k)?;
                if k.len() != 1 {
                    return Err(err("bag needs one index".into()));
                }
                bags.push((k[0], ids(vs)?));
            } else if let Some(rest) = line.strip_prefix("tree ") {
                let e = ids(rest)?;
                if e.len() != 2 {
                    return Err(err("tree edge needs two nodes".into()));
                }
                edges.push((e[0], e[1]));
            } else {
                return Err(err(format!("unrecognized line {:?}", line)));
            }
        }
        bags.sort_by_key(|b| b.0);
        if bags.iter().enumerate().any(|(i, b)| b.0 != i) {
            return Err(DecompError::Parse { line: 0, msg: "bags must be numbered 0..m".into() });
        }
        Ok(TreeDecomposition { bags: bags.into_iter().map(|b| b.1).collect(), edges })
    }

    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1)
    }

    pub fn tree_neighbors(&self, t: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| if a == t { Some(b) } else if b == t { Some(a) } else { None })
            .collect();
        out.sort_unstable();
        out
    }

    /// Nodes of the component of `T - removed` that contains `start`.
    pub fn component_without(&self, removed: usize, start: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        if start == removed {
            return seen;
        }
        seen.insert(start);
        let mut queue = VecDeque::from([start]);
        while let Some(t) = queue.pop_front() {
            for u in self.tree_neighbors(t) {
                if u != removed && seen.insert(u) {
                    queue.push_back(u);
                }
            }
        }
        seen
    }

    pub fn bags_containing(&self, v: Vertex) -> Vec<usize> {
        (0..self.bags.len()).filter(|&t| self.bags[t].contains(&v)).collect()
    }

    /// Checks the three axioms (vertex cover, edge cover, connected occurrence) and that T is a tree.
    pub fn validate(&self, g: &Graph) -> Result<(), DecompError> {
        let m = self.bags.len();
        if m == 0 || self.edges.len() + 1 != m {
            return Err(DecompError::NotATree(m));
        }
        for (i, bag) in self.bags.iter().enumerate() {
            if bag.iter().any(|&v| v >= g.n()) {
                return Err(DecompError::BadBag(i));
            }
        }
        if self.edges.iter().any(|&(a, b)| a >= m || b >= m) || self.component_without(usize::MAX, 0).len() != m {
            return Err(DecompError::NotATree(m));
        }
        for v in 0..g.n() {
            let holding: BTreeSet<usize> = self.bags_containing(v).into_iter().collect();
            let Some(&first) = holding.iter().next() else {
                return Err(DecompError::UncoveredVertex(v));
            };
            let mut seen = BTreeSet::from([first]);
            let mut queue = VecDeque::from([first]);
            while let Some(t) = queue.pop_front() {
                for u in self.tree_neighbors(t) {
                    if holding.contains(&u) && seen.insert(u) {
                        queue.push_back(u);
                    }
                }
            }
            if seen.len() != holding.len() {
                return Err(DecompError::Disconnected(v));
            }
        }
        for (u, v) in g.edges() {
            if !self.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
                return Err(DecompError::UncoveredEdge(u, v));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families;

    #[test]
    fn path_decomposition_validates() {
        let g = families::path(4).unwrap();
        let td = TreeDecomposition { bags: vec![vec![0, 1], vec![1, 2], vec![2, 3]], edges: vec![(0, 1), (1, 2)] };
        assert_eq!(td.validate(&g), Ok(()));
        assert_eq!(td.width(), 1);
    }

    #[test]
    fn axioms_are_enforced() {
        let g = families::path(3).unwrap();
        let missing_edge = TreeDecomposition { bags: vec![vec![0, 1], vec![2]], edges: vec![(0, 1)] };
        assert_eq!(missing_edge.validate(&g), Err(DecompError::UncoveredEdge(1, 2)));
        let split = TreeDecomposition {
            bags: vec![vec![0, 1], vec![1, 2], vec![0]],
            edges: vec![(0, 1), (1, 2)],
        };
        assert_eq!(split.validate(&g), Err(DecompError::Disconnected(0)));
        let forest = TreeDecomposition { bags: vec![vec![0, 1], vec![1, 2]], edges: vec![] };
        assert_eq!(forest.validate(&g), Err(DecompError::NotATree(2)));
    }
}
