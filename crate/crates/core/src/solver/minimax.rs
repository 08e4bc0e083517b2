//! Time-unrolled minimax used as an independent check of the fixed-point solver.

use super::GameGraph;
use super::solve::Winner;

/// Guaranteed number of target visits per state, capped at `|targets| + 1`.
///
/// `value[h+1](s) = [s is a target] + max/min over successors of value[h]`, with capture
/// states worth nothing. The iteration stops at a fixpoint or after `cap * |states|` rounds.
pub fn visit_values<A: GameGraph>(arena: &A, visit: &[bool]) -> (Vec<u32>, usize) {
    let n = arena.num_states();
    let targets = visit.iter().filter(|&&v| v).count();
    let cap = targets as u32 + 1;
    let rounds = (cap as usize).saturating_mul(n.max(1));
    let mut value = vec![0u32; n];
    let mut next = vec![0u32; n];
    let mut used = 0;
    for round in 0..rounds {
        let mut changed = false;
        for s in 0..n {
            if arena.is_capture(s) {
                next[s] = 0;
                continue;
            }
            let robber = !arena.cops_to_move(s);
            let mut best: Option<u32> = None;
            arena.for_each_successor(s, |t| {
                let v = value[t];
                best = Some(match best {
                    None => v,
                    Some(b) if robber => b.max(v),
                    Some(b) => b.min(v),
                });
            });
            let v = (u32::from(visit[s]) + best.unwrap_or(0)).min(cap);
            if v != value[s] {
                changed = true;
            }
            next[s] = v;
        }
        std::mem::swap(&mut value, &mut next);
        used = round + 1;
        if !changed {
            break;
        }
    }
    (value, used)
}

/// Winner per state under the Buchi condition, from the visit counts.
pub fn minimax_winners<A: GameGraph>(arena: &A, visit: &[bool]) -> Vec<Winner> {
    let cap = visit.iter().filter(|&&v| v).count() as u32 + 1;
    let (value, _) = visit_values(arena, visit);
    value.into_iter().map(|v| if v >= cap { Winner::Robber } else { Winner::Cops }).collect()
}
