//! Baseline cop agents used as adversaries in the evasion suites.

use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::{AgentError, CopAgent, GameParams, GameState};
use crate::graph::{Graph, Vertex};

/// Targets an intercepting cop may head for, given the robber's vertex.
pub type TargetFn = Rc<dyn Fn(&Graph, Vertex) -> Vec<Vertex>>;

#[derive(Clone)]
pub enum ScriptKind {
    Greedy,
    Intercept(TargetFn),
    /// Seeded choice hashed from the current positions, so play stays a function of the configuration.
    Random(u64),
    /// Seeded choice drawn from a running generator; not certifiable.
    RandomStream(u64),
    Stationary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Placement {
    /// Cop `j` starts at vertex `j * n / k`.
    Spread,
    Fixed(Vec<Vertex>),
}

#[derive(Clone)]
pub struct ScriptedCops {
    kind: ScriptKind,
    k: usize,
    speed: usize,
    reach: usize,
    placement: Placement,
    rng: ChaCha8Rng,
}

impl ScriptedCops {
    pub fn new(kind: ScriptKind, k: usize, speed: usize, reach: usize) -> Self {
        let seed = match kind {
            ScriptKind::Random(s) | ScriptKind::RandomStream(s) => s,
            _ => 0,
        };
        ScriptedCops { kind, k, speed, reach, placement: Placement::Spread, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn with_placement(mut self, placement: Placement) -> Self {
        self.placement = placement;
        self
    }

    fn toward(g: &Graph, from: Vertex, speed: usize, field: &[Option<usize>]) -> Vertex {
        let ball = g.ball(from, speed, true).unwrap_or_else(|_| vec![from]);
        let mut best = from;
        let mut best_d = field[from].unwrap_or(usize::MAX);
        for v in ball {
            let d = field[v].unwrap_or(usize::MAX);
            if d < best_d || (d == best_d && v < best) {
                best = v;
                best_d = d;
            }
        }
        best
    }
}

pub(crate) fn mix(parts: &[u64]) -> u64 {
    let mut h = 0x9e37_79b9_7f4a_7c15u64;
    for &p in parts {
        let mut z = h ^ p.wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        h = z ^ (z >> 31);
    }
    h
}

impl CopAgent for ScriptedCops {
    fn name(&self) -> String {
        match &self.kind {
            ScriptKind::Greedy => "greedy".into(),
            ScriptKind::Intercept(_) => "intercept".into(),
            ScriptKind::Random(s) => format!("random({})", s),
            ScriptKind::RandomStream(s) => format!("random-stream({})", s),
            ScriptKind::Stationary => "stationary".into(),
        }
    }

    fn count(&self) -> usize {
        self.k
    }

    fn speed(&mut self) -> usize {
        self.speed
    }

    fn reach(&mut self, _robber_speed: Option<usize>) -> usize {
        self.reach
    }

    fn place(&mut self, g: &Graph, _params: &GameParams) -> Result<Vec<Vertex>, AgentError> {
        match &self.placement {
            Placement::Fixed(v) => {
                if v.len() != self.k || v.iter().any(|&x| !g.contains(x)) {
                    return Err(AgentError::Config(format!("fixed placement {:?} does not fit {} cops", v, self.k)));
                }
                Ok(v.clone())
            }
            Placement::Spread => match self.kind {
                ScriptKind::Random(s) | ScriptKind::RandomStream(s) => {
                    Ok((0..self.k).map(|j| (mix(&[s, j as u64, 0xfeed]) % g.n() as u64) as usize).collect())
                }
                _ => Ok((0..self.k).map(|j| j * g.n() / self.k.max(1)).collect()),
            },
        }
    }

    fn step(&mut self, g: &Graph, _params: &GameParams, state: &GameState) -> Result<Vec<Vertex>, AgentError> {
        let r = state.robber;
        match self.kind.clone() {
            ScriptKind::Stationary => Ok(state.cops.clone()),
            ScriptKind::Greedy => {
                let field = g.distance_field(&[r], usize::MAX);
                Ok(state.cops.iter().map(|&c| Self::toward(g, c, self.speed, &field)).collect())
            }
            ScriptKind::Intercept(targets) => {
                let to_robber = g.distance_field(&[r], usize::MAX);
                let mut ts = targets(g, r);
                if ts.is_empty() {
                    return Ok(state.cops.iter().map(|&c| Self::toward(g, c, self.speed, &to_robber)).collect());
                }
                ts.sort_by_key(|&t| (to_robber[t].unwrap_or(usize::MAX), t));
                ts.dedup();
                Ok(state
                    .cops
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| {
                        let field = g.distance_field(&[ts[j % ts.len()]], usize::MAX);
                        Self::toward(g, c, self.speed, &field)
                    })
                    .collect())
            }
            ScriptKind::Random(seed) => Ok(state
                .cops
                .iter()
                .enumerate()
                .map(|(j, &c)| {
                    let ball = g.ball(c, self.speed, true).unwrap_or_else(|_| vec![c]);
                    let mut rng = ChaCha8Rng::seed_from_u64(mix(&[seed, j as u64, c as u64, r as u64]));
                    ball[rng.gen_range(0..ball.len())]
                })
                .collect()),
            ScriptKind::RandomStream(_) => Ok(state
                .cops
                .iter()
                .map(|&c| {
                    let ball = g.ball(c, self.speed, true).unwrap_or_else(|_| vec![c]);
                    ball[self.rng.gen_range(0..ball.len())]
                })
                .collect()),
        }
    }

    fn deterministic(&self) -> bool {
        !matches!(self.kind, ScriptKind::RandomStream(_))
    }
}
