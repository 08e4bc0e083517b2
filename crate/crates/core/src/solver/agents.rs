//! Agents that play positional strategies read off a solved arena, and a replay check
//! that runs them through the match engine.

use std::rc::Rc;

use super::arena::Arena;
use super::solve::{Winner, WinningSets};
use super::GameGraph;
use crate::game::{
    robber_reach_from, run_match, AgentError, CopAgent, GameParams, GameState, MatchOptions, Mover, Objective,
    Phase, RobberAgent, Verdict,
};
use crate::graph::{Graph, Vertex};

/// Assigns the sorted multiset `dest` to the cops at `from` so that every cop moves at most `speed`.
pub fn match_cops(g: &Graph, from: &[Vertex], dest: &[Vertex], speed: usize) -> Option<Vec<Vertex>> {
    let k = from.len();
    let ok: Vec<Vec<bool>> = from
        .iter()
        .map(|&a| dest.iter().map(|&b| g.dist_capped(a, b, speed).ok().and_then(|d| d.finite()).is_some()).collect())
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; k];
    fn augment(i: usize, ok: &[Vec<bool>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for j in 0..ok[i].len() {
            if ok[i][j] && !seen[j] {
                seen[j] = true;
                if owner[j].is_none_or(|o| augment(o, ok, owner, seen)) {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    for i in 0..k {
        if !augment(i, &ok, &mut owner, &mut vec![false; k]) {
            return None;
        }
    }
    let mut out = vec![0; k];
    for (j, o) in owner.iter().enumerate() {
        out[o.unwrap()] = dest[j];
    }
    Some(out)
}

/// Cops following the solver's strategy; outside their winning region they take the first move.
#[derive(Clone)]
pub struct ArenaCops {
    arena: Rc<Arena>,
    sets: Rc<WinningSets>,
    placement: Vec<Vertex>,
}

impl ArenaCops {
    pub fn new(arena: Rc<Arena>, sets: Rc<WinningSets>, placement: Vec<Vertex>) -> Self {
        ArenaCops { arena, sets, placement }
    }
}

impl CopAgent for ArenaCops {
    fn name(&self) -> String {
        "solver-cops".into()
    }

    fn count(&self) -> usize {
        self.arena.params.cops
    }

    fn speed(&mut self) -> usize {
        self.arena.params.cop_speed
    }

    fn reach(&mut self, _robber_speed: Option<usize>) -> usize {
        self.arena.params.reach
    }

    fn place(&mut self, _g: &Graph, _params: &GameParams) -> Result<Vec<Vertex>, AgentError> {
        Ok(self.placement.clone())
    }

    fn step(&mut self, g: &Graph, params: &GameParams, state: &GameState) -> Result<Vec<Vertex>, AgentError> {
        let id = self
            .arena
            .id(&state.cops, state.robber, Phase::CopsToMove)
            .ok_or_else(|| AgentError::Invariant("position outside the arena".into()))?;
        let next = match self.sets.cop_move[id] {
            Some(t) => t,
            None => self.arena.successors(id).into_iter().next().ok_or_else(|| AgentError::Invariant("no cop move".into()))?,
        };
        let dest = self.arena.state(next).cops;
        match_cops(g, &state.cops, &dest, params.cop_speed)
            .ok_or_else(|| AgentError::Invariant(format!("no assignment of {:?} to cops at {:?}", dest, state.cops)))
    }
}

/// Robber following the solver's strategy; outside its winning region it prefers target vertices.
#[derive(Clone)]
pub struct ArenaRobber {
    arena: Rc<Arena>,
    sets: Rc<WinningSets>,
    start: Option<Vertex>,
}

impl ArenaRobber {
    pub fn new(arena: Rc<Arena>, sets: Rc<WinningSets>, start: Option<Vertex>) -> Self {
        ArenaRobber { arena, sets, start }
    }
}

impl RobberAgent for ArenaRobber {
    fn name(&self) -> String {
        "solver-robber".into()
    }

    fn speed(&mut self, _g: &Graph, _cop_speed: usize, _reach: Option<usize>) -> Result<usize, AgentError> {
        Ok(self.arena.params.robber_speed)
    }

    fn objective(&mut self, _g: &Graph, _cop_speed: usize, _robber_speed: usize, _reach: usize) -> Result<Objective, AgentError> {
        Ok(self.arena.params.objective.clone())
    }

    fn place(&mut self, _g: &Graph, _params: &GameParams, cops: &[Vertex]) -> Result<Vertex, AgentError> {
        if let Some(r) = self.start {
            return Ok(r);
        }
        let n = self.arena.num_vertices();
        let ids: Vec<(Vertex, usize)> = (0..n).filter_map(|r| Some((r, self.arena.id(cops, r, Phase::CopsToMove)?))).collect();
        ids.iter()
            .find(|(_, id)| self.sets.winner[*id] == Winner::Robber)
            .or_else(|| ids.iter().find(|(_, id)| !self.arena.is_capture(*id)))
            .map(|(r, _)| *r)
            .ok_or_else(|| AgentError::Invariant("every vertex is within reach".into()))
    }

    fn step(&mut self, g: &Graph, params: &GameParams, state: &GameState) -> Result<Vec<Vertex>, AgentError> {
        let id = self
            .arena
            .id(&state.cops, state.robber, Phase::RobberToMove)
            .ok_or_else(|| AgentError::Invariant("position outside the arena".into()))?;
        let next = match self.sets.robber_move[id] {
            Some(t) => t,
            None => {
                let succ = self.arena.successors(id);
                succ.iter()
                    .copied()
                    .find(|&t| self.arena.is_target(t))
                    .or_else(|| succ.first().copied())
                    .ok_or_else(|| AgentError::Invariant("no robber move".into()))?
            }
        };
        let dest = self.arena.state(next).robber;
        robber_reach_from(g, &state.cops, state.robber, params.robber_speed, params.reach)
            .path_to(dest)
            .ok_or_else(|| AgentError::Invariant(format!("vertex {} unreachable", dest)))
    }
}

/// Outcome of replaying the solved strategies from one start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayOutcome {
    pub cops: Vec<Vertex>,
    pub robber: Vertex,
    pub winner: Winner,
    pub verdict: Verdict,
    /// Whether the winner's objective held over the replay.
    pub achieved: bool,
    pub detail: String,
}

/// Plays both extracted strategies from `(cops, robber)` for `periods * |states|` stages.
/// A robber win needs a target visit in every window of `|states|` stages without capture;
/// a cop win needs capture, or no target visit after the first `|states|` stages.
pub fn replay_strategies(g: &Graph, arena: &Rc<Arena>, sets: &Rc<WinningSets>, cops: &[Vertex], robber: Vertex, periods: usize) -> ReplayOutcome {
    let window = arena.num_states();
    let id = arena.id(cops, robber, Phase::CopsToMove).expect("start inside the arena");
    let winner = sets.winner[id];
    let mut cop_agent = ArenaCops::new(Rc::clone(arena), Rc::clone(sets), cops.to_vec());
    let mut robber_agent = ArenaRobber::new(Rc::clone(arena), Rc::clone(sets), Some(robber));
    let opts = MatchOptions { horizon: periods * window, certify: false, record: true, dist_cap: Some(0) };
    let order = arena.params.order;
    let result = run_match(g, order, &mut cop_agent, &mut robber_agent, &opts);
    let mask = super::arena::objective_vertices(g, &arena.params.objective);
    let visits: Vec<usize> =
        result.trace.records.iter().filter(|r| r.mover == Mover::Robber && mask[r.robber]).map(|r| r.stage).collect();
    let (achieved, detail) = match (winner, &result.verdict) {
        (Winner::Robber, Verdict::HorizonExhausted { stages, .. }) => {
            let mut last = 0;
            let mut worst = 0;
            for &v in visits.iter().chain(std::iter::once(stages)) {
                worst = worst.max(v - last);
                last = v;
            }
            (worst <= window, format!("longest gap between target visits {} stages", worst))
        }
        (Winner::Cops, Verdict::Captured { stage }) => (*stage <= window, format!("captured at stage {}", stage)),
        (Winner::Cops, Verdict::HorizonExhausted { .. }) => {
            let late = visits.iter().filter(|&&v| v > window).count();
            (late == 0, format!("{} target visits after stage {}", late, window))
        }
        (_, v) => (false, format!("unexpected verdict {}", v)),
    };
    ReplayOutcome { cops: cops.to_vec(), robber, winner, verdict: result.verdict, achieved, detail }
}
