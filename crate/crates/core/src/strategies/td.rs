//! Cop strategy that sweeps a tree decomposition towards the robber.

use std::collections::BTreeSet;

use crate::game::{AgentError, CopAgent, Counters, GameParams, GameState, Objective};
use crate::graph::TreeDecomposition;
use crate::graph::{Graph, Vertex};

#[derive(Debug, Clone)]
struct Transition {
    to: usize,
    /// Per-cop remaining path; empty means the cop stays put.
    paths: Vec<Vec<Vertex>>,
}

#[derive(Clone)]
pub struct TdCops {
    decomp: TreeDecomposition,
    k: usize,
    current: usize,
    transition: Option<Transition>,
    holding: bool,
    visited: Vec<usize>,
    ball: Vec<bool>,
    notes: Vec<String>,
    counters: Counters,
}

impl TdCops {
    pub fn new(decomp: TreeDecomposition) -> Self {
        let k = decomp.width() + 1;
        TdCops {
            decomp,
            k,
            current: 0,
            transition: None,
            holding: false,
            visited: Vec::new(),
            ball: Vec::new(),
            notes: Vec::new(),
            counters: Counters::new(),
        }
    }

    pub fn current_bag(&self) -> usize {
        self.current
    }

    pub fn visited(&self) -> &[usize] {
        &self.visited
    }

    fn bump(&mut self, key: &str) {
        *self.counters.entry(key.to_string()).or_insert(0) += 1;
    }

    fn bag_cover(&self, bag: usize) -> Vec<Vertex> {
        let b = &self.decomp.bags[bag];
        (0..self.k).map(|j| b[j.min(b.len() - 1)]).collect()
    }

    /// Tree component of `T - current` holding every bag that contains `x`.
    fn robber_side(&self, x: Vertex) -> Option<(usize, BTreeSet<usize>)> {
        let bags = self.decomp.bags_containing(x);
        let start = *bags.first()?;
        if bags.contains(&self.current) {
            return None;
        }
        let side = self.decomp.component_without(self.current, start);
        let next = self.decomp.tree_neighbors(self.current).into_iter().find(|t| side.contains(t))?;
        Some((next, side))
    }

    fn plan(&mut self, g: &Graph, cops: &[Vertex], to: usize) -> Result<Transition, AgentError> {
        let from_bag: BTreeSet<Vertex> = self.decomp.bags[self.current].iter().copied().collect();
        let to_bag: BTreeSet<Vertex> = self.decomp.bags[to].iter().copied().collect();
        let mut keep = vec![false; cops.len()];
        for v in from_bag.intersection(&to_bag) {
            if let Some(j) = (0..cops.len()).find(|&j| cops[j] == *v && !keep[j]) {
                keep[j] = true;
            }
        }
        let mut paths = vec![Vec::new(); cops.len()];
        let mut free: Vec<usize> = (0..cops.len()).filter(|&j| !keep[j]).collect();
        for &v in to_bag.difference(&from_bag) {
            let field = g.distance_field(&[v], usize::MAX);
            let Some(pos) = (0..free.len()).min_by_key(|&i| (field[cops[free[i]]].unwrap_or(usize::MAX), free[i])) else {
                return Err(AgentError::Invariant(format!("no free cop for bag {} vertex {}", to, v)));
            };
            let j = free.remove(pos);
            let path = g
                .shortest_path(cops[j], v, usize::MAX)
                .ok_or_else(|| AgentError::Invariant(format!("vertex {} unreachable", v)))?;
            paths[j] = path[1..].to_vec();
        }
        Ok(Transition { to, paths })
    }
}

impl CopAgent for TdCops {
    fn name(&self) -> String {
        format!("td-cops(width={})", self.decomp.width())
    }

    fn count(&self) -> usize {
        self.k
    }

    fn speed(&mut self) -> usize {
        1
    }

    fn reach(&mut self, _robber_speed: Option<usize>) -> usize {
        1
    }

    fn place(&mut self, g: &Graph, params: &GameParams) -> Result<Vec<Vertex>, AgentError> {
        self.decomp.validate(g).map_err(|e| AgentError::Config(e.to_string()))?;
        let adjacent_equal = self.decomp.edges.iter().any(|&(a, b)| {
            let (x, y): (BTreeSet<_>, BTreeSet<_>) =
                (self.decomp.bags[a].iter().collect(), self.decomp.bags[b].iter().collect());
            x == y
        });
        if adjacent_equal {
            return Err(AgentError::Config("adjacent bags are equal".into()));
        }
        let center = match &params.objective {
            Objective::ProtectBall { center, .. } | Objective::Divergence { center } => *center,
            Objective::ProtectFinite(set) => set[0],
        };
        self.ball = params.objective.target_mask(g);
        if self.ball.iter().all(|&b| !b) {
            self.ball = vec![false; g.n()];
            self.ball[center] = true;
        }
        self.current = *self.decomp.bags_containing(center).first().ok_or_else(|| AgentError::Config("center not in any bag".into()))?;
        self.visited = vec![self.current];
        self.notes.push(format!("start bag={}", self.current));
        Ok(self.bag_cover(self.current))
    }

    fn step(&mut self, g: &Graph, _params: &GameParams, state: &GameState) -> Result<Vec<Vertex>, AgentError> {
        if self.transition.is_none() {
            let Some((next, side)) = self.robber_side(state.robber) else {
                self.bump("robber_in_bag");
                return Ok(state.cops.clone());
            };
            let bag: BTreeSet<Vertex> = self.decomp.bags[self.current].iter().copied().collect();
            let ball_on_side =
                side.iter().flat_map(|&t| self.decomp.bags[t].iter()).any(|&v| self.ball[v] && !bag.contains(&v));
            if !ball_on_side {
                if !self.holding {
                    self.notes.push(format!("hold bag={}", self.current));
                }
                self.holding = true;
                self.bump("holds");
                return Ok(state.cops.clone());
            }
            self.holding = false;
            self.transition = Some(self.plan(g, &state.cops, next)?);
            self.notes.push(format!("advance from={} to={}", self.current, next));
        }
        let mut t = self.transition.take().unwrap();
        let dest: Vec<Vertex> = state
            .cops
            .iter()
            .zip(t.paths.iter_mut())
            .map(|(&c, p)| if p.is_empty() { c } else { p.remove(0) })
            .collect();
        let to_bag: BTreeSet<Vertex> = self.decomp.bags[t.to].iter().copied().collect();
        let separator: Vec<Vertex> = self.decomp.bags[self.current].iter().copied().filter(|v| to_bag.contains(v)).collect();
        if separator.iter().any(|v| !dest.contains(v)) {
            self.bump("separator_uncovered");
            return Err(AgentError::Invariant(format!("separator {:?} uncovered during transition", separator)));
        }
        if t.paths.iter().all(|p| p.is_empty()) {
            if to_bag.iter().any(|v| !dest.contains(v)) {
                return Err(AgentError::Invariant(format!("bag {} not covered after transition", t.to)));
            }
            if self.visited.contains(&t.to) {
                self.bump("bag_revisited");
                return Err(AgentError::Invariant(format!("bag {} visited twice", t.to)));
            }
            self.current = t.to;
            self.visited.push(t.to);
            self.bump("transitions");
        } else {
            self.transition = Some(t);
        }
        Ok(dest)
    }

    fn memory(&self) -> Vec<u64> {
        let mut m = vec![self.current as u64, u64::from(self.holding)];
        if let Some(t) = &self.transition {
            m.push(t.to as u64);
            for p in &t.paths {
                m.push(u64::MAX);
                m.extend(p.iter().map(|&v| v as u64));
            }
        }
        m
    }

    fn notes(&mut self) -> Vec<String> {
        std::mem::take(&mut self.notes)
    }

    fn counters(&self) -> Counters {
        self.counters.clone()
    }
}
