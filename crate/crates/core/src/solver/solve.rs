use std::collections::VecDeque;

use super::arena::{build_arena, Arena, StateId};
use super::GameGraph;
use super::SolverError;
use crate::game::{GameParams, Phase};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Winner {
    Cops,
    Robber,
}

/// Per-state winners and positional strategies for both sides.
#[derive(Debug, Clone)]
pub struct WinningSets {
    pub winner: Vec<Winner>,
    /// Chosen successor at robber-turn states the robber wins.
    pub robber_move: Vec<Option<StateId>>,
    /// Chosen successor at cop-turn states the cops win.
    pub cop_move: Vec<Option<StateId>>,
    /// Attractor rank of each cop-won state towards capture (safety solves) or
    /// towards the trap layer it falls into (Buchi solves).
    pub cop_rank: Vec<u32>,
}

impl WinningSets {
    pub fn robber_wins(&self, id: StateId) -> bool {
        self.winner[id] == Winner::Robber
    }

    pub fn count(&self, w: Winner) -> usize {
        self.winner.iter().filter(|&&x| x == w).count()
    }

    /// One line per state: `id cops robber phase winner`.
    pub fn to_table(&self, arena: &Arena) -> String {
        let mut out = String::new();
        for (id, w) in self.winner.iter().enumerate() {
            let s = arena.state(id);
            let phase = if s.phase == Phase::CopsToMove { "cops" } else { "robber" };
            let who = if *w == Winner::Cops { "cops" } else { "robber" };
            out.push_str(&format!("{} {:?} {} {} {}\n", id, s.cops, s.robber, phase, who));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Player {
    Cops,
    Robber,
}

fn owner<A: GameGraph>(arena: &A, id: StateId) -> Player {
    if arena.cops_to_move(id) {
        Player::Cops
    } else {
        Player::Robber
    }
}

struct Attractor {
    inside: Vec<bool>,
    rank: Vec<u32>,
    choice: Vec<Option<StateId>>,
}

/// States inside `alive` from which `player` forces a visit to `seed`.
fn attractor<A: GameGraph>(arena: &A, alive: &[bool], seed: &[bool], player: Player) -> Attractor {
    let n = arena.num_states();
    let mut inside = vec![false; n];
    let mut rank = vec![u32::MAX; n];
    let mut choice = vec![None; n];
    let mut remaining = vec![0usize; n];
    for s in 0..n {
        if alive[s] {
            let mut c = 0;
            arena.for_each_successor(s, |t| {
                if alive[t] {
                    c += 1
                }
            });
            remaining[s] = c;
        }
    }
    let mut queue = VecDeque::new();
    for s in 0..n {
        if alive[s] && seed[s] {
            inside[s] = true;
            rank[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(t) = queue.pop_front() {
        arena.for_each_predecessor(t, |p| {
            if !alive[p] || inside[p] {
                return;
            }
            if owner(arena, p) == player {
                inside[p] = true;
                rank[p] = rank[t] + 1;
                choice[p] = Some(t);
                queue.push_back(p);
            } else {
                remaining[p] -= 1;
                if remaining[p] == 0 {
                    inside[p] = true;
                    rank[p] = rank[t] + 1;
                    queue.push_back(p);
                }
            }
        });
    }
    Attractor { inside, rank, choice }
}

/// Robber wins iff he is never captured and visits target states infinitely often.
pub fn solve_buchi<A: GameGraph>(arena: &A, visit: &[bool]) -> WinningSets {
    let n = arena.num_states();
    let all = vec![true; n];
    let captures: Vec<bool> = (0..n).map(|s| arena.is_capture(s)).collect();
    let base = attractor(arena, &all, &captures, Player::Cops);
    let mut cop_won = base.inside;
    let mut cop_move = base.choice;
    let mut cop_rank = base.rank;
    loop {
        let alive: Vec<bool> = cop_won.iter().map(|&w| !w).collect();
        let seed: Vec<bool> = (0..n).map(|s| alive[s] && visit[s]).collect();
        let reach = attractor(arena, &alive, &seed, Player::Robber);
        let trap: Vec<bool> = (0..n).map(|s| alive[s] && !reach.inside[s]).collect();
        if !trap.iter().any(|&t| t) {
            let robber_move = (0..n)
                .map(|s| {
                    if !alive[s] || arena.cops_to_move(s) {
                        return None;
                    }
                    let mut best: Option<StateId> = None;
                    arena.for_each_successor(s, |t| {
                        if alive[t] && best.is_none_or(|b| reach.rank[t] < reach.rank[b]) {
                            best = Some(t);
                        }
                    });
                    best
                })
                .collect();
            let winner = cop_won.iter().map(|&w| if w { Winner::Cops } else { Winner::Robber }).collect();
            return WinningSets { winner, robber_move, cop_move, cop_rank };
        }
        for s in 0..n {
            if trap[s] && arena.cops_to_move(s) {
                let mut pick = None;
                arena.for_each_successor(s, |t| {
                    if pick.is_none() && (trap[t] || cop_won[t]) {
                        pick = Some(t);
                    }
                });
                cop_move[s] = pick;
            }
        }
        let seed: Vec<bool> = (0..n).map(|s| cop_won[s] || trap[s]).collect();
        let grown = attractor(arena, &all, &seed, Player::Cops);
        for s in 0..n {
            if grown.inside[s] && !seed[s] {
                cop_move[s] = grown.choice[s];
                cop_rank[s] = grown.rank[s];
            } else if trap[s] {
                cop_rank[s] = 0;
            }
        }
        cop_won = grown.inside;
    }
}

/// Robber wins iff he avoids capture forever.
pub fn solve_safety<A: GameGraph>(arena: &A) -> WinningSets {
    let n = arena.num_states();
    let mask: Vec<bool> = (0..n).map(|s| !arena.is_capture(s)).collect();
    solve_safety_within(arena, &mask)
}

/// Robber wins iff he stays forever in `region` (capture states never count as inside).
pub fn solve_safety_within<A: GameGraph>(arena: &A, region: &[bool]) -> WinningSets {
    let n = arena.num_states();
    let all = vec![true; n];
    let bad: Vec<bool> = (0..n).map(|s| arena.is_capture(s) || !region[s]).collect();
    let attr = attractor(arena, &all, &bad, Player::Cops);
    let robber_move = (0..n)
        .map(|s| {
            if attr.inside[s] || arena.cops_to_move(s) {
                return None;
            }
            let mut pick = None;
            arena.for_each_successor(s, |t| {
                if pick.is_none() && !attr.inside[t] {
                    pick = Some(t);
                }
            });
            pick
        })
        .collect();
    let winner = attr.inside.iter().map(|&w| if w { Winner::Cops } else { Winner::Robber }).collect();
    WinningSets { winner, robber_move, cop_move: attr.choice, cop_rank: attr.rank }
}

/// Target mask of the arena's objective, as a state mask.
pub fn target_states<A: GameGraph>(arena: &A) -> Vec<bool> {
    (0..arena.num_states()).map(|s| arena.is_target(s)).collect()
}

/// Cop placements from which the cops win against every robber placement.
pub fn winning_placements(arena: &Arena, sets: &WinningSets) -> Vec<Vec<usize>> {
    let n = arena.num_vertices();
    arena
        .cop_sets()
        .iter()
        .filter(|m| (0..n).all(|r| sets.winner[arena.id(m, r, Phase::CopsToMove).unwrap()] == Winner::Cops))
        .cloned()
        .collect()
}

/// Whether some cop placement wins the objective against every robber placement.
pub fn copwin(g: &Graph, params: &GameParams, budget: usize) -> Result<bool, SolverError> {
    let arena = build_arena(g, params, budget)?;
    let sets = solve_buchi(&arena, &target_states(&arena));
    Ok(!winning_placements(&arena, &sets).is_empty())
}
