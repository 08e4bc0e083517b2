use std::collections::HashMap;

use super::{GameGraph, SolverError};
use crate::game::{robber_reach_from, threat, GameParams, Objective, Phase};
use crate::graph::{Graph, Vertex};

pub const DEFAULT_BUDGET: usize = 5_000_000;

pub type StateId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArenaState {
    pub cops: Vec<Vertex>,
    pub robber: Vertex,
    pub phase: Phase,
}

/// The finite game graph: one state per (sorted cop multiset, robber vertex, side to move).
/// State ids are `(multiset * n + robber) * 2 + side`, with side 0 for the cops.
#[derive(Debug, Clone)]
pub struct Arena {
    pub params: GameParams,
    n: usize,
    cop_sets: Vec<Vec<Vertex>>,
    index: HashMap<Vec<Vertex>, usize>,
    cop_moves: Vec<Vec<u32>>,
    cop_preds: Vec<Vec<u32>>,
    /// Robber destinations per `(multiset, robber)`, CSR layout.
    robber_off: Vec<usize>,
    robber_to: Vec<u32>,
    robber_pred_off: Vec<usize>,
    robber_from: Vec<u32>,
    captured: Vec<bool>,
    target: Vec<bool>,
}

fn binomial(n: usize, k: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

fn multisets(n: usize, k: usize) -> Vec<Vec<Vertex>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, lo: usize, cur: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in lo..n {
            cur.push(v);
            rec(n, k, v, cur, out);
            cur.pop();
        }
    }
    rec(n, k, 0, &mut cur, &mut out);
    out
}

/// Vertices the robber wants to keep visiting, per objective. Divergence cannot be
/// achieved on a finite graph, so every vertex counts and only capture wins for the cops.
pub fn objective_vertices(g: &Graph, objective: &Objective) -> Vec<bool> {
    match objective {
        Objective::Divergence { .. } => vec![true; g.n()],
        other => other.target_mask(g),
    }
}

pub fn arena_size(n: usize, k: usize) -> Option<usize> {
    binomial(n + k - usize::from(k > 0), k)?.checked_mul(n)?.checked_mul(2)
}

pub fn build_arena(g: &Graph, params: &GameParams, budget: usize) -> Result<Arena, SolverError> {
    params.validate(g).map_err(|e| SolverError::Params(e.to_string()))?;
    let n = g.n();
    let k = params.cops;
    let states = arena_size(n, k).unwrap_or(usize::MAX);
    if states > budget {
        return Err(SolverError::Budget { states, budget });
    }
    let cop_sets = multisets(n, k);
    let index: HashMap<Vec<Vertex>, usize> = cop_sets.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
    let balls: Vec<Vec<Vertex>> =
        (0..n).map(|v| g.ball(v, params.cop_speed, true).map_err(|e| SolverError::Params(e.to_string()))).collect::<Result<_, _>>()?;

    let mut cop_moves = Vec::with_capacity(cop_sets.len());
    for m in &cop_sets {
        let mut succ: Vec<u32> = Vec::new();
        let mut cur = vec![0; k];
        fn rec(j: usize, m: &[Vertex], balls: &[Vec<Vertex>], cur: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
            if j == m.len() {
                let mut s = cur.clone();
                s.sort_unstable();
                out.push(s);
                return;
            }
            for &v in &balls[m[j]] {
                cur[j] = v;
                rec(j + 1, m, balls, cur, out);
            }
        }
        let mut raw = Vec::new();
        rec(0, m, &balls, &mut cur, &mut raw);
        raw.sort_unstable();
        raw.dedup();
        succ.extend(raw.iter().map(|s| index[s] as u32));
        cop_moves.push(succ);
    }
    let mut cop_preds = vec![Vec::new(); cop_sets.len()];
    for (m, succ) in cop_moves.iter().enumerate() {
        for &s in succ {
            cop_preds[s as usize].push(m as u32);
        }
    }

    let pairs = cop_sets.len() * n;
    let mut captured = vec![false; pairs];
    let mut robber_off = Vec::with_capacity(pairs + 1);
    let mut robber_to = Vec::new();
    robber_off.push(0);
    for (mi, m) in cop_sets.iter().enumerate() {
        for r in 0..n {
            if threat(g, m, r, params.reach).is_some() {
                captured[mi * n + r] = true;
            } else {
                let reach = robber_reach_from(g, m, r, params.robber_speed, params.reach);
                robber_to.extend(reach.reachable().into_iter().map(|v| v as u32));
            }
            robber_off.push(robber_to.len());
        }
    }
    let mut counts = vec![0usize; pairs + 1];
    for p in 0..pairs {
        let m = p / n;
        for &r2 in &robber_to[robber_off[p]..robber_off[p + 1]] {
            counts[m * n + r2 as usize + 1] += 1;
        }
    }
    for i in 0..pairs {
        counts[i + 1] += counts[i];
    }
    let robber_pred_off = counts.clone();
    let mut fill = counts;
    let mut robber_from = vec![0u32; robber_to.len()];
    for p in 0..pairs {
        let m = p / n;
        for &r2 in &robber_to[robber_off[p]..robber_off[p + 1]] {
            let q = m * n + r2 as usize;
            robber_from[fill[q]] = (p % n) as u32;
            fill[q] += 1;
        }
    }
    let target = objective_vertices(g, &params.objective);
    Ok(Arena {
        params: params.clone(),
        n,
        cop_sets,
        index,
        cop_moves,
        cop_preds,
        robber_off,
        robber_to,
        robber_pred_off,
        robber_from,
        captured,
        target,
    })
}

impl Arena {
    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn cop_sets(&self) -> &[Vec<Vertex>] {
        &self.cop_sets
    }

    pub fn id(&self, cops: &[Vertex], robber: Vertex, phase: Phase) -> Option<StateId> {
        let mut sorted = cops.to_vec();
        sorted.sort_unstable();
        let m = *self.index.get(&sorted)?;
        if robber >= self.n {
            return None;
        }
        Some((m * self.n + robber) * 2 + usize::from(phase == Phase::RobberToMove))
    }

    pub fn state(&self, id: StateId) -> ArenaState {
        let pair = id / 2;
        ArenaState {
            cops: self.cop_sets[pair / self.n].clone(),
            robber: pair % self.n,
            phase: if id % 2 == 0 { Phase::CopsToMove } else { Phase::RobberToMove },
        }
    }

    pub fn target_count(&self) -> usize {
        (0..self.num_states()).filter(|&s| self.is_target(s)).count()
    }

    pub fn out_degree(&self, id: StateId) -> usize {
        if self.is_capture(id) {
            return 0;
        }
        let pair = id / 2;
        if self.cops_to_move(id) {
            self.cop_moves[pair / self.n].len()
        } else {
            self.robber_off[pair + 1] - self.robber_off[pair]
        }
    }

    pub fn edge_count(&self) -> usize {
        (0..self.num_states()).map(|s| self.out_degree(s)).sum()
    }
}

impl GameGraph for Arena {
    fn num_states(&self) -> usize {
        self.cop_sets.len() * self.n * 2
    }

    fn cops_to_move(&self, id: StateId) -> bool {
        id % 2 == 0
    }

    fn is_capture(&self, id: StateId) -> bool {
        self.captured[id / 2]
    }

    fn is_target(&self, id: StateId) -> bool {
        self.cops_to_move(id) && !self.is_capture(id) && self.target[(id / 2) % self.n]
    }

    fn for_each_successor(&self, id: StateId, mut f: impl FnMut(StateId)) {
        if self.is_capture(id) {
            return;
        }
        let pair = id / 2;
        let (m, r) = (pair / self.n, pair % self.n);
        if self.cops_to_move(id) {
            for &m2 in &self.cop_moves[m] {
                f((m2 as usize * self.n + r) * 2 + 1);
            }
        } else {
            for &r2 in &self.robber_to[self.robber_off[pair]..self.robber_off[pair + 1]] {
                f((m * self.n + r2 as usize) * 2);
            }
        }
    }

    fn for_each_predecessor(&self, id: StateId, mut f: impl FnMut(StateId)) {
        let pair = id / 2;
        let (m, r) = (pair / self.n, pair % self.n);
        if self.cops_to_move(id) {
            for &r0 in &self.robber_from[self.robber_pred_off[pair]..self.robber_pred_off[pair + 1]] {
                f((m * self.n + r0 as usize) * 2 + 1);
            }
        } else {
            for &m0 in &self.cop_preds[m] {
                let p = m0 as usize * self.n + r;
                if !self.captured[p] {
                    f(p * 2);
                }
            }
        }
    }
}
