//! Robber strategy on the branch `G_C` of the hub graph.

use crate::game::{AgentError, Counters, GameParams, GameState, Objective, RobberAgent};
use crate::graph::families::{HubBranch, HubGraph};
use crate::graph::{Graph, Vertex};

/// Branch degree for `k` cops: `max(k, 2(s_c+ρ)) + 1`, rounded up to a multiple of `4 s_c`.
pub fn hub_branch_degree(k: usize, cop_speed: usize, reach: usize) -> usize {
    let base = k.max(2 * (cop_speed + reach)) + 1;
    base.next_multiple_of(4 * cop_speed)
}

pub struct HubRobber {
    c: usize,
    branch: HubBranch,
    hub: Vertex,
    depth: usize,
    s: usize,
    reach: usize,
    plan: Vec<Vec<Vertex>>,
    notes: Vec<String>,
    counters: Counters,
}

impl HubRobber {
    pub fn new(hub: &HubGraph, c: usize) -> Result<Self, AgentError> {
        let branch = hub.branch(c).ok_or_else(|| AgentError::Config(format!("branch {} is not materialized", c)))?.clone();
        if hub.depth < 2 {
            return Err(AgentError::Config("hub strategy needs tree depth at least 2".into()));
        }
        Ok(HubRobber {
            c,
            branch,
            hub: hub.hub,
            depth: hub.depth,
            s: 1,
            reach: 1,
            plan: Vec::new(),
            notes: Vec::new(),
            counters: Counters::new(),
        })
    }

    fn bump(&mut self, key: &str) {
        *self.counters.entry(key.to_string()).or_insert(0) += 1;
    }

    /// Nearest cop distance, `None` if beyond `cap`.
    fn cop_distance(g: &Graph, cops: &[Vertex], v: Vertex, cap: usize) -> Option<usize> {
        cops.iter().filter_map(|&c| g.dist_capped(v, c, cap).ok().and_then(|d| d.finite())).min()
    }

    fn safe(&self, g: &Graph, cops: &[Vertex], v: Vertex) -> bool {
        Self::cop_distance(g, cops, v, self.c / 2).is_none()
    }

    fn super_safe(&self, g: &Graph, cops: &[Vertex], v: Vertex) -> bool {
        Self::cop_distance(g, cops, v, 3 * self.c / 4).is_none()
    }

    /// Interior tree nodes in order of preference: shallow first, then lowest id.
    fn ranked(&self, nodes: impl Iterator<Item = usize>) -> Vec<usize> {
        let mut out: Vec<usize> = nodes.filter(|&t| self.branch.is_interior(t, self.depth)).collect();
        out.sort_by_key(|&t| (self.branch.level[t], self.branch.nodes[t]));
        out
    }
}

impl RobberAgent for HubRobber {
    fn name(&self) -> String {
        format!("hub-robber(C={})", self.c)
    }

    fn speed(&mut self, _g: &Graph, cop_speed: usize, _reach: Option<usize>) -> Result<usize, AgentError> {
        self.s = cop_speed;
        Ok(4 * cop_speed)
    }

    fn objective(&mut self, _g: &Graph, cop_speed: usize, _robber_speed: usize, reach: usize) -> Result<Objective, AgentError> {
        self.reach = reach;
        if self.c <= 2 * (cop_speed + reach) || self.c % (4 * cop_speed) != 0 {
            return Err(AgentError::Config(format!(
                "C={} must exceed {} and be a multiple of {}",
                self.c,
                2 * (cop_speed + reach),
                4 * cop_speed
            )));
        }
        Ok(Objective::ProtectBall { center: self.hub, radius: 2 * self.c })
    }

    fn place(&mut self, g: &Graph, params: &GameParams, cops: &[Vertex]) -> Result<Vertex, AgentError> {
        if self.c <= params.cops {
            return Err(AgentError::Config(format!("C={} must exceed the cop count {}", self.c, params.cops)));
        }
        let start = self.ranked(0..self.branch.nodes.len()).into_iter().find(|&t| self.safe(g, cops, self.branch.nodes[t]));
        match start {
            Some(t) => Ok(self.branch.nodes[t]),
            None => {
                self.bump("no_safe_start");
                Err(AgentError::Invariant("no safe interior tree vertex".into()))
            }
        }
    }

    fn step(&mut self, g: &Graph, params: &GameParams, state: &GameState) -> Result<Vec<Vertex>, AgentError> {
        if !self.plan.is_empty() {
            return Ok(self.plan.remove(0));
        }
        let u = state.robber;
        let Some(node) = self.branch.node_of(u) else {
            return Err(AgentError::Invariant(format!("robber at {} is not a tree vertex", u)));
        };
        if self.safe(g, &state.cops, u) {
            if Self::cop_distance(g, &state.cops, u, self.reach).is_some() {
                self.bump("safe_within_reach");
                return Err(AgentError::Invariant(format!("safe vertex {} within reach of a cop", u)));
            }
            self.bump("waits");
            return Ok(vec![u]);
        }
        let usable = |w: usize| {
            let path = self.branch.edge_path(node, w)?;
            let free = path.iter().all(|v| !state.cops.contains(v));
            (free && self.super_safe(g, &state.cops, self.branch.nodes[w])).then_some(path)
        };
        let candidates = self.ranked(self.branch.tree_neighbors(node).into_iter());
        let Some(path) = candidates.into_iter().find_map(usable) else {
            if self.branch.tree_neighbors(node).into_iter().any(|w| usable(w).is_some()) {
                self.bump("window_depth_reached");
                return Err(AgentError::Config(format!("only super-safe neighbours of {} lie on the window cut", u)));
            }
            self.bump("no_super_safe_neighbor");
            return Err(AgentError::Invariant(format!("no super-safe neighbour of {} with a free path", u)));
        };
        let leg = params.robber_speed;
        let len = path.len() - 1;
        self.plan = (0..len.div_ceil(leg)).map(|m| path[m * leg..=((m + 1) * leg).min(len)].to_vec()).collect();
        if self.plan.len() != self.c / (4 * self.s) {
            return Err(AgentError::Invariant(format!("relocation takes {} stages", self.plan.len())));
        }
        self.bump("relocations");
        self.notes.push(format!("relocate to={}", path[path.len() - 1]));
        Ok(self.plan.remove(0))
    }

    fn memory(&self) -> Vec<u64> {
        self.plan.iter().flat_map(|leg| leg.iter().map(|&v| v as u64).chain(std::iter::once(u64::MAX))).collect()
    }

    fn notes(&mut self) -> Vec<String> {
        std::mem::take(&mut self.notes)
    }

    fn counters(&self) -> Counters {
        self.counters.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_degree_rounding() {
        assert_eq!(hub_branch_degree(2, 1, 1), 8);
        assert_eq!(hub_branch_degree(1, 1, 1), 8);
        assert_eq!(hub_branch_degree(9, 1, 1), 12);
        assert_eq!(hub_branch_degree(1, 2, 1), 8);
    }
}
