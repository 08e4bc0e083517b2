//! Robber that evades inside a fat minor by following a haven of the pattern graph.

use std::collections::BTreeSet;
use std::rc::Rc;

use crate::game::{forbidden_set, AgentError, Counters, GameParams, GameState, Objective, RobberAgent};
use crate::geometry::{FatMinorModel, Projection};
use crate::graph::{Graph, Vertex};
use crate::solver::Haven;

pub struct HavenRobber {
    model: Rc<FatMinorModel>,
    haven: Haven,
    projection: Projection,
    support: Vec<Vertex>,
    in_support: Vec<bool>,
    cop_speed: usize,
    reach: usize,
    previous: Vec<Vertex>,
    /// Host vertices within reach of each connection path.
    path_reach: Vec<Vec<bool>>,
    counters: Counters,
    notes: Vec<String>,
}

/// Haven diagnostics for one robber turn.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HavenStage {
    /// Pattern edges `(u, v)` leaving the previous haven component next to a cop projecting to `u`.
    pub guarded: Vec<(Vertex, Vertex)>,
    /// Cops guarding no edge.
    pub free_cops: Vec<Vertex>,
    /// The pattern sets `U_j`, one per guarded edge.
    pub u_sets: Vec<Vec<Vertex>>,
    /// Whether the route through every intermediate target was found.
    pub route_ok: bool,
}

impl HavenRobber {
    /// `haven` must be a haven of `model.pattern`.
    pub fn new(model: Rc<FatMinorModel>, haven: Haven) -> Self {
        let projection = Projection::new(&model);
        let support = model.support();
        let mut in_support = vec![false; model.host.n()];
        for &v in &support {
            in_support[v] = true;
        }
        HavenRobber {
            model,
            haven,
            projection,
            support,
            in_support,
            cop_speed: 1,
            reach: 0,
            previous: Vec::new(),
            path_reach: Vec::new(),
            counters: Counters::new(),
            notes: Vec::new(),
        }
    }

    fn bump(&mut self, key: &str) {
        *self.counters.entry(key.to_string()).or_insert(0) += 1;
    }

    fn fail(&mut self, key: &str, msg: String) -> AgentError {
        self.bump(key);
        AgentError::Invariant(msg)
    }

    /// Pattern vertices of a set of host vertices, checking that each projects to at most one.
    fn project(&mut self, cops: &[Vertex]) -> Result<Vec<Vertex>, AgentError> {
        for &y in cops {
            self.bump("unique_branch_checks");
            if self.projection.of(y).len() > 1 {
                return Err(self.fail("unique_branch_failures", format!("vertex {} projects to {:?}", y, self.projection.of(y))));
            }
        }
        Ok(self.projection.of_set(cops))
    }

    fn beta(&mut self, set: &[Vertex]) -> Result<Vec<Vertex>, AgentError> {
        self.haven
            .beta(&self.model.pattern, set)
            .ok_or_else(|| AgentError::Invariant(format!("haven has no component for {:?}", set)))
    }

    /// `beta(X_H)` lifted to the host, checked nonempty, connected and far from `cops`.
    fn bramble(&mut self, g: &Graph, cops: &[Vertex]) -> Result<(Vec<Vertex>, Vec<Vertex>), AgentError> {
        let xh = self.project(cops)?;
        let comp = self.beta(&xh)?;
        let lifted = self.model.lift(&comp);
        self.bump("bramble_checks");
        if lifted.is_empty() || !connected(g, &lifted) {
            return Err(self.fail("bramble_failures", format!("lift of {:?} is empty or disconnected", comp)));
        }
        let gap = self.cop_speed + self.reach;
        if !cops.is_empty() {
            let near = g.multi_source_dist_capped(cops, gap).map_err(|e| AgentError::Invariant(e.to_string()))?;
            self.bump("dist_checks");
            if let Some(&v) = lifted.iter().find(|&&v| near.contains_key(&v)) {
                return Err(self.fail("dist_failures", format!("vertex {} of the lifted component is within {} of a cop", v, gap)));
            }
        }
        Ok((comp, lifted))
    }

    /// Guarded edges, free cops, the sets `U_j` and a check that the robber can pass through
    /// every `F_j` to `B^perp` on safe vertices of the model.
    pub fn diagnose(&mut self, g: &Graph, previous: &[Vertex], cops: &[Vertex], robber: Vertex) -> Result<HavenStage, AgentError> {
        let ah = self.project(previous)?;
        let a_comp: BTreeSet<Vertex> = self.beta(&ah)?.into_iter().collect();
        let mut guarded = Vec::new();
        let mut guards = BTreeSet::new();
        if self.path_reach.is_empty() {
            self.path_reach = self.model.paths.iter().map(|(_, p)| g.distance_field(p, self.reach).iter().map(Option::is_some).collect()).collect();
        }
        for (i, &((x, y), _)) in self.model.paths.iter().enumerate() {
            for (u, v) in [(x, y), (y, x)] {
                if !a_comp.contains(&u) || a_comp.contains(&v) {
                    continue;
                }
                let near = &self.path_reach[i];
                let by: Vec<usize> = (0..cops.len()).filter(|&j| near[cops[j]] && self.projection.of(cops[j]) == [u]).collect();
                if !by.is_empty() {
                    guarded.push((u, v));
                    guards.extend(by);
                }
            }
        }
        guarded.sort_unstable();
        let free_cops: Vec<Vertex> = cops.iter().enumerate().filter(|(j, _)| !guards.contains(j)).map(|(_, &c)| c).collect();
        let zh = self.project(&free_cops)?;
        let s = guarded.len();
        let mut u_sets = Vec::new();
        for j in 1..=s {
            let mut set: Vec<Vertex> = guarded[..j].iter().map(|e| e.0).chain(guarded[j - 1..].iter().map(|e| e.1)).collect();
            set.sort_unstable();
            set.dedup();
            u_sets.push(set);
        }
        let bh = self.project(cops)?;
        let b_comp = self.beta(&bh)?;
        let mut queried: Vec<(Vec<Vertex>, Vec<Vertex>)> = vec![(ah.clone(), a_comp.iter().copied().collect()), (bh, b_comp.clone())];
        let mut targets = Vec::new();
        for set in &u_sets {
            let mut key: Vec<Vertex> = set.iter().chain(&zh).copied().collect();
            key.sort_unstable();
            key.dedup();
            let comp = self.beta(&key)?;
            targets.push(self.model.lift(&comp));
            queried.push((key, comp));
        }
        if s == 0 {
            let comp = self.beta(&zh)?;
            queried.push((zh.clone(), comp));
        }
        for (x, bx) in &queried {
            for (y, by) in &queried {
                if x.iter().all(|v| y.contains(v)) {
                    self.bump("monotonicity_checks");
                    if !by.iter().all(|v| bx.contains(v)) {
                        return Err(self.fail("monotonicity_failures", format!("component of {:?} not inside that of {:?}", y, x)));
                    }
                }
            }
        }
        targets.push(self.model.lift(&b_comp));
        self.bump("robber_component_checks");
        let a_lift = self.model.lift(&a_comp.iter().copied().collect::<Vec<_>>());
        if a_lift.binary_search(&robber).is_err() {
            self.bump("robber_component_failures");
        }
        let forbidden = forbidden_set(g, cops, self.reach);
        let in_support = &self.in_support;
        let safe = |v: Vertex| in_support[v] && !forbidden.contains(&v);
        let mut at = robber;
        let mut route_ok = safe(robber);
        for (j, t) in targets.iter().enumerate() {
            if !route_ok {
                break;
            }
            if j + 1 < targets.len() && t.iter().any(|v| forbidden.contains(v)) {
                route_ok = false;
                break;
            }
            let member: BTreeSet<Vertex> = t.iter().copied().collect();
            match g.shortest_path_where(at, usize::MAX, safe, |v| member.contains(&v)) {
                Some(p) => at = *p.last().unwrap(),
                None => route_ok = false,
            }
        }
        self.bump("route_checks");
        if !route_ok {
            self.bump("route_failures");
            self.notes.push(format!("no route through the intermediate components for cops {:?}", cops));
        }
        Ok(HavenStage { guarded, free_cops, u_sets, route_ok })
    }
}

fn connected(g: &Graph, set: &[Vertex]) -> bool {
    let inside: BTreeSet<Vertex> = set.iter().copied().collect();
    let Some(&s) = set.first() else { return false };
    let mut seen = BTreeSet::from([s]);
    let mut stack = vec![s];
    while let Some(v) = stack.pop() {
        for &w in g.adj(v) {
            if inside.contains(&w) && seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.len() == inside.len()
}

impl RobberAgent for HavenRobber {
    fn name(&self) -> String {
        "haven-robber".into()
    }

    fn speed(&mut self, _g: &Graph, cop_speed: usize, reach: Option<usize>) -> Result<usize, AgentError> {
        self.cop_speed = cop_speed;
        if let Some(r) = reach {
            let need = 2 * (cop_speed + r + 1);
            if self.model.fatness < need {
                return Err(AgentError::Config(format!("model fatness {} below {}", self.model.fatness, need)));
            }
        }
        Ok(self.support.len().saturating_sub(1).max(1))
    }

    fn objective(&mut self, g: &Graph, cop_speed: usize, _robber_speed: usize, reach: usize) -> Result<Objective, AgentError> {
        self.cop_speed = cop_speed;
        self.reach = reach;
        let need = 2 * (cop_speed + reach + 1);
        if self.model.fatness < need {
            return Err(AgentError::Config(format!("model fatness {} below {}", self.model.fatness, need)));
        }
        let center = self.support[0];
        let field = g.distance_field(&[center], usize::MAX);
        let radius = self.support.iter().filter_map(|&v| field[v]).max().unwrap_or(0).max(1);
        Ok(Objective::ProtectBall { center, radius })
    }

    fn place(&mut self, g: &Graph, params: &GameParams, cops: &[Vertex]) -> Result<Vertex, AgentError> {
        if cops.len() + 1 >= self.haven.order {
            return Err(AgentError::Config(format!("{} cops need a haven of order at least {}", params.cops, cops.len() + 2)));
        }
        self.previous = cops.to_vec();
        let (_, lifted) = self.bramble(g, cops)?;
        Ok(lifted[0])
    }

    fn step(&mut self, g: &Graph, _params: &GameParams, state: &GameState) -> Result<Vec<Vertex>, AgentError> {
        let previous = std::mem::replace(&mut self.previous, state.cops.clone());
        let (_, target) = self.bramble(g, &state.cops)?;
        self.diagnose(g, &previous, &state.cops, state.robber)?;
        if target.binary_search(&state.robber).is_ok() {
            self.bump("stays");
            return Ok(vec![state.robber]);
        }
        let forbidden = forbidden_set(g, &state.cops, self.reach);
        let path = g.shortest_path_where(
            state.robber,
            usize::MAX,
            |v| self.in_support[v] && !forbidden.contains(&v),
            |v| target.binary_search(&v).is_ok(),
        );
        match path {
            Some(p) => {
                self.bump("moves");
                Ok(p)
            }
            None => Err(self.fail("no_safe_path", format!("no safe path inside the model from {} to the haven component", state.robber))),
        }
    }

    fn notes(&mut self) -> Vec<String> {
        std::mem::take(&mut self.notes)
    }

    fn counters(&self) -> Counters {
        self.counters.clone()
    }
}
