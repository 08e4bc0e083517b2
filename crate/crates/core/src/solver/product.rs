//! Game graph against a fixed deterministic cop agent, and the robber that best responds to it.

use std::collections::{HashMap, VecDeque};
use std::rc::Rc;

use super::solve::{solve_buchi, solve_safety, target_states, Winner, WinningSets};
use super::{GameGraph, SolverError};
use crate::game::{
    robber_reach_from, threat, AgentError, CopAgent, GameParams, GameState, Objective, Phase, RobberAgent, Status,
};
use crate::graph::{Graph, Vertex};

type Key = (Vec<u64>, Vec<Vertex>, Vertex, bool);

/// States `(cop agent memory, cop positions, robber, side to move)` reachable from the
/// agent's placement, with one capture sink and one forfeit sink.
#[derive(Debug, Clone)]
pub struct ProductArena {
    keys: Vec<Key>,
    index: HashMap<Key, usize>,
    succ: Vec<Vec<u32>>,
    pred: Vec<Vec<u32>>,
    capture: usize,
    forfeit: usize,
    target: Vec<bool>,
    /// Cop-turn states for each robber placement.
    pub starts: Vec<(Vertex, usize)>,
}

impl GameGraph for ProductArena {
    fn num_states(&self) -> usize {
        self.keys.len()
    }

    fn cops_to_move(&self, s: usize) -> bool {
        s == self.forfeit || (s != self.capture && !self.keys[s].3)
    }

    fn is_capture(&self, s: usize) -> bool {
        s == self.capture
    }

    fn is_target(&self, s: usize) -> bool {
        s == self.forfeit || (self.cops_to_move(s) && !self.is_capture(s) && self.target[self.keys[s].2])
    }

    fn for_each_successor(&self, s: usize, mut f: impl FnMut(usize)) {
        for &t in &self.succ[s] {
            f(t as usize);
        }
    }

    fn for_each_predecessor(&self, s: usize, mut f: impl FnMut(usize)) {
        for &t in &self.pred[s] {
            f(t as usize);
        }
    }
}

impl ProductArena {
    pub fn build<A: CopAgent + Clone>(g: &Graph, params: &GameParams, agent: &A, cops: &[Vertex], budget: usize) -> Result<Self, SolverError> {
        let target = super::arena::objective_vertices(g, &params.objective);
        let mut pa = ProductArena {
            keys: vec![(Vec::new(), Vec::new(), 0, false), (Vec::new(), Vec::new(), 0, false)],
            index: HashMap::new(),
            succ: vec![Vec::new(), vec![1]],
            pred: vec![Vec::new(), vec![1]],
            capture: 0,
            forfeit: 1,
            target,
            starts: Vec::new(),
        };
        let mut agents: HashMap<usize, A> = HashMap::new();
        let mut queue = VecDeque::new();
        let intern = |pa: &mut ProductArena, key: Key, queue: &mut VecDeque<usize>| -> Result<usize, SolverError> {
            if let Some(&id) = pa.index.get(&key) {
                return Ok(id);
            }
            if pa.keys.len() >= budget {
                return Err(SolverError::Budget { states: pa.keys.len() + 1, budget });
            }
            let id = pa.keys.len();
            pa.keys.push(key.clone());
            pa.index.insert(key, id);
            pa.succ.push(Vec::new());
            pa.pred.push(Vec::new());
            queue.push_back(id);
            Ok(id)
        };
        for r in 0..g.n() {
            if threat(g, cops, r, params.reach).is_some() {
                continue;
            }
            let id = intern(&mut pa, (agent.memory(), cops.to_vec(), r, false), &mut queue)?;
            agents.entry(id).or_insert_with(|| agent.clone());
            pa.starts.push((r, id));
        }
        while let Some(id) = queue.pop_front() {
            let (mem, cops, r, robber_turn) = pa.keys[id].clone();
            let mut next = Vec::new();
            if robber_turn {
                let reach = robber_reach_from(g, &cops, r, params.robber_speed, params.reach);
                for r2 in reach.reachable() {
                    let t = intern(&mut pa, (mem.clone(), cops.clone(), r2, false), &mut queue)?;
                    if !agents.contains_key(&t) {
                        let a = agents.get(&id).cloned().expect("agent snapshot");
                        agents.insert(t, a);
                    }
                    next.push(t);
                }
                agents.remove(&id);
            } else {
                let mut a = agents.remove(&id).expect("agent snapshot");
                let state = GameState { stage: 0, cops: cops.clone(), robber: r, phase: Phase::CopsToMove, status: Status::Running };
                match a.step(g, params, &state) {
                    Ok(dest) => {
                        if threat(g, &dest, r, params.reach).is_some() {
                            next.push(pa.capture);
                        } else {
                            let t = intern(&mut pa, (a.memory(), dest, r, true), &mut queue)?;
                            agents.entry(t).or_insert(a);
                            next.push(t);
                        }
                    }
                    Err(_) => next.push(pa.forfeit),
                }
            }
            for &t in &next {
                pa.pred[t].push(id as u32);
            }
            pa.succ[id] = next.into_iter().map(|t| t as u32).collect();
        }
        Ok(pa)
    }

    pub fn id(&self, memory: &[u64], cops: &[Vertex], robber: Vertex, robber_turn: bool) -> Option<usize> {
        self.index.get(&(memory.to_vec(), cops.to_vec(), robber, robber_turn)).copied()
    }

    pub fn robber_vertex(&self, s: usize) -> Vertex {
        self.keys[s].2
    }
}

/// Solved product arena shared by a best-response robber.
pub struct Response {
    pub arena: ProductArena,
    pub buchi: WinningSets,
    pub safety: WinningSets,
}

impl Response {
    /// Robber preference: win the objective, else avoid capture, else delay it.
    fn rank(&self, s: usize) -> (u8, u32) {
        if self.buchi.winner[s] == Winner::Robber {
            (2, 0)
        } else if self.safety.winner[s] == Winner::Robber {
            (1, 0)
        } else {
            (0, self.safety.cop_rank[s])
        }
    }

    fn choose(&self, s: usize) -> Option<usize> {
        if self.buchi.winner[s] == Winner::Robber {
            return self.buchi.robber_move[s];
        }
        let mut best: Option<usize> = None;
        for t in self.arena.successors(s) {
            if best.is_none_or(|b| self.rank(t) > self.rank(b)) {
                best = Some(t);
            }
        }
        best
    }
}

/// Solves the game against `agent` (before placement) and returns a robber that plays
/// the solved strategy, tracking the agent's memory with a private copy.
pub fn best_response<A: CopAgent + Clone>(g: &Graph, params: &GameParams, agent: &A, budget: usize) -> Result<BestResponseRobber<A>, SolverError> {
    let mut shadow = agent.clone();
    let cops = shadow.place(g, params).map_err(|e| SolverError::Agent(e.to_string()))?;
    let arena = ProductArena::build(g, params, &shadow, &cops, budget)?;
    let buchi = solve_buchi(&arena, &target_states(&arena));
    let safety = solve_safety(&arena);
    let response = Rc::new(Response { arena, buchi, safety });
    Ok(BestResponseRobber {
        response,
        shadow,
        speed: params.robber_speed,
        objective: params.objective.clone(),
        last: None,
        counters: Default::default(),
    })
}

pub struct BestResponseRobber<A> {
    response: Rc<Response>,
    shadow: A,
    speed: usize,
    objective: Objective,
    last: Option<GameState>,
    counters: crate::game::Counters,
}

impl<A> BestResponseRobber<A> {
    pub fn response(&self) -> &Response {
        &self.response
    }

    /// Whether the robber wins the objective from its chosen start.
    pub fn start_wins(&self) -> Option<bool> {
        let r = self.last.as_ref()?.robber;
        let s = self.response.arena.starts.iter().find(|(v, _)| *v == r)?.1;
        Some(self.response.buchi.winner[s] == Winner::Robber)
    }
}

impl<A: CopAgent + Clone> RobberAgent for BestResponseRobber<A> {
    fn name(&self) -> String {
        "best-response".into()
    }

    fn speed(&mut self, _g: &Graph, _cop_speed: usize, _reach: Option<usize>) -> Result<usize, AgentError> {
        Ok(self.speed)
    }

    fn objective(&mut self, _g: &Graph, _cop_speed: usize, _robber_speed: usize, _reach: usize) -> Result<Objective, AgentError> {
        Ok(self.objective.clone())
    }

    fn place(&mut self, _g: &Graph, _params: &GameParams, cops: &[Vertex]) -> Result<Vertex, AgentError> {
        let resp = &self.response;
        let Some(best) = resp.arena.starts.iter().max_by_key(|(v, s)| (resp.rank(*s), std::cmp::Reverse(*v))) else {
            // Every vertex is within reach: any placement is captured at once.
            return Ok(cops[0]);
        };
        let state = GameState { stage: 0, cops: cops.to_vec(), robber: best.0, phase: Phase::CopsToMove, status: Status::Running };
        self.last = Some(state);
        Ok(best.0)
    }

    fn step(&mut self, g: &Graph, params: &GameParams, state: &GameState) -> Result<Vec<Vertex>, AgentError> {
        let prev = self.last.take().ok_or_else(|| AgentError::Invariant("step before placement".into()))?;
        let predicted = self.shadow.step(g, params, &prev)?;
        if predicted != state.cops {
            return Err(AgentError::Invariant(format!("cops moved to {:?}, model predicted {:?}", state.cops, predicted)));
        }
        let resp = Rc::clone(&self.response);
        let s = resp
            .arena
            .id(&self.shadow.memory(), &state.cops, state.robber, true)
            .ok_or_else(|| AgentError::Invariant("position missing from the solved arena".into()))?;
        let t = resp.choose(s).ok_or_else(|| AgentError::Invariant("no move from a live position".into()))?;
        let dest = resp.arena.robber_vertex(t);
        *self.counters.entry(format!("winning_moves_{}", resp.rank(t).0)).or_insert(0) += 1;
        let path = robber_reach_from(g, &state.cops, state.robber, params.robber_speed, params.reach)
            .path_to(dest)
            .ok_or_else(|| AgentError::Invariant(format!("vertex {} unreachable", dest)))?;
        let mut next = state.clone();
        next.robber = dest;
        next.phase = Phase::CopsToMove;
        self.last = Some(next);
        Ok(path)
    }

    fn memory(&self) -> Vec<u64> {
        self.shadow.memory()
    }

    fn counters(&self) -> crate::game::Counters {
        self.counters.clone()
    }
}
