//! Relocation strategy along a long cycle with geodesic subpaths.

use std::collections::HashMap;

use crate::game::{AgentError, Counters, GameParams, GameState, Objective, RobberAgent};
use crate::graph::{geodesic_subpaths_ok, Graph, Vertex};

pub struct CycleRobber {
    cycle: Vec<Vertex>,
    index: HashMap<Vertex, usize>,
    s: usize,
    reach: usize,
    plan: Vec<Vec<Vertex>>,
    /// Post-relocation distances, one per completed relocation.
    post_distances: Vec<usize>,
    notes: Vec<String>,
    counters: Counters,
}

impl CycleRobber {
    pub fn new(cycle: Vec<Vertex>) -> Self {
        let index = cycle.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        CycleRobber {
            cycle,
            index,
            s: 1,
            reach: 1,
            plan: Vec::new(),
            post_distances: Vec::new(),
            notes: Vec::new(),
            counters: Counters::new(),
        }
    }

    pub fn safe_distance(&self) -> usize {
        10 * self.reach * self.s + self.s
    }

    pub fn relocation_length(&self) -> usize {
        100 * self.reach * self.s
    }

    /// Cop-to-robber distances observed right after each relocation.
    pub fn post_distances(&self) -> &[usize] {
        &self.post_distances
    }

    fn bump(&mut self, key: &str) {
        *self.counters.entry(key.to_string()).or_insert(0) += 1;
    }

    fn arc(&self, from: usize, dir: isize, len: usize) -> Vec<Vertex> {
        let n = self.cycle.len() as isize;
        (0..=len as isize).map(|k| self.cycle[(from as isize + dir * k).rem_euclid(n) as usize]).collect()
    }

    fn nearest_cop(g: &Graph, cops: &[Vertex], v: Vertex, cap: usize) -> Option<usize> {
        cops.iter().filter_map(|&c| g.dist_capped(v, c, cap).ok().and_then(|d| d.finite())).min()
    }
}

impl RobberAgent for CycleRobber {
    fn name(&self) -> String {
        format!("cycle-robber(len={})", self.cycle.len())
    }

    fn speed(&mut self, _g: &Graph, cop_speed: usize, _reach: Option<usize>) -> Result<usize, AgentError> {
        self.s = cop_speed;
        Ok(100 * cop_speed)
    }

    fn objective(&mut self, g: &Graph, _cop_speed: usize, _robber_speed: usize, reach: usize) -> Result<Objective, AgentError> {
        self.reach = reach;
        let need = 400 * reach * self.s;
        if self.cycle.len() < need {
            return Err(AgentError::Config(format!("cycle of length {} is shorter than {}", self.cycle.len(), need)));
        }
        let ok = geodesic_subpaths_ok(g, &self.cycle, 200 * reach * self.s).map_err(|e| AgentError::Config(e.to_string()))?;
        if !ok {
            return Err(AgentError::Config("cycle has a non-geodesic subpath".into()));
        }
        let center = self.cycle[0];
        let field = g.distance_field(&[center], usize::MAX);
        let radius = self.cycle.iter().filter_map(|&v| field[v]).max().unwrap_or(1).max(1);
        Ok(Objective::ProtectBall { center, radius })
    }

    fn place(&mut self, g: &Graph, params: &GameParams, cops: &[Vertex]) -> Result<Vertex, AgentError> {
        if params.cops > 1 {
            return Err(AgentError::Config(format!("cycle strategy plays against one cop, got {}", params.cops)));
        }
        let safe = self.safe_distance();
        self.cycle
            .iter()
            .copied()
            .find(|&v| Self::nearest_cop(g, cops, v, safe).is_none_or(|d| d >= safe))
            .ok_or_else(|| AgentError::Invariant("no safe start on the cycle".into()))
    }

    fn step(&mut self, g: &Graph, params: &GameParams, state: &GameState) -> Result<Vec<Vertex>, AgentError> {
        let safe = self.safe_distance();
        if !self.plan.is_empty() {
            let leg = self.plan.remove(0);
            if self.plan.is_empty() {
                let end = *leg.last().unwrap();
                let d = Self::nearest_cop(g, &state.cops, end, usize::MAX).unwrap_or(usize::MAX);
                self.post_distances.push(d);
                if d < safe {
                    self.bump("post_relocation_unsafe");
                }
                let min = self.counters.entry("min_post_distance".into()).or_insert(u64::MAX);
                *min = (*min).min(d as u64);
                self.notes.push(format!("relocated post_distance={}", d));
            }
            return Ok(leg);
        }
        let d = Self::nearest_cop(g, &state.cops, state.robber, safe).unwrap_or(usize::MAX);
        if d >= safe {
            self.bump("waits");
            return Ok(vec![state.robber]);
        }
        let (s, reach) = (self.s, self.reach);
        if d < 10 * reach * s {
            self.bump("trigger_distance_violations");
        }
        let at = *self
            .index
            .get(&state.robber)
            .ok_or_else(|| AgentError::Invariant(format!("robber at {} is off the cycle", state.robber)))?;
        let len = self.relocation_length();
        let clearance = reach * s + reach;
        let near = g.distance_field(&state.cops, clearance);
        let clear = |arc: &[Vertex]| arc.iter().all(|&v| near[v].is_none());
        let forward = self.arc(at, 1, len);
        let backward = self.arc(at, -1, len);
        let route = if clear(&forward) {
            forward
        } else if clear(&backward) {
            backward
        } else {
            self.bump("no_clear_side");
            return Err(AgentError::Invariant(format!("cop within {} of both arcs at stage {}", clearance, state.stage)));
        };
        let stages = reach;
        let speed = params.robber_speed;
        self.plan = (0..stages).map(|m| route[m * len / stages..=(m + 1) * len / stages].to_vec()).collect();
        if len.div_ceil(stages) > speed {
            return Err(AgentError::Invariant("relocation leg exceeds robber speed".into()));
        }
        self.bump("relocations");
        self.notes.push(format!("relocate trigger_distance={} to={}", d, route[len]));
        self.step(g, params, state)
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
