use std::collections::HashMap;
use std::fmt;

use super::{
    apply_cop_move, apply_robber_move, robber_reach_from, AgentError, CopAgent, Counters, GameParams, GameState, Mover,
    Objective, Order, RobberAgent, Status, Trace, TraceRecord,
};
use crate::graph::{Graph, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Cops,
    Robber,
    Engine,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Cops => "cops",
            Side::Robber => "robber",
            Side::Engine => "engine",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Captured { stage: usize },
    /// Play repeated a full configuration and the period meets the robber's objective.
    CertifiedRobberWin { period_start: usize, period: usize },
    /// Play repeated a full configuration, the period never reaches the target and
    /// no legal robber move during the period could reach it either.
    CopObjectiveMet { period_start: usize, period: usize },
    HorizonExhausted { stages: usize, target_visits: usize, reason: String },
    /// An agent broke a rule of the game.
    Forfeit { side: Side, reason: String },
    /// A strategy invariant failed during play.
    InvariantFailure { side: Side, reason: String },
    /// An agent rejected its configuration.
    ConfigFault { side: Side, reason: String },
}

impl Verdict {
    pub fn status(&self) -> Option<Status> {
        match self {
            Verdict::Captured { .. } => Some(Status::Captured),
            Verdict::CertifiedRobberWin { .. } => Some(Status::CertifiedRobberWin),
            Verdict::CopObjectiveMet { .. } => Some(Status::CopObjectiveMet),
            Verdict::HorizonExhausted { .. } => Some(Status::HorizonExhausted),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Captured { stage } => write!(f, "Captured stage={}", stage),
            Verdict::CertifiedRobberWin { period_start, period } => {
                write!(f, "CertifiedRobberWin period_start={} period={}", period_start, period)
            }
            Verdict::CopObjectiveMet { period_start, period } => {
                write!(f, "CopObjectiveMet period_start={} period={}", period_start, period)
            }
            Verdict::HorizonExhausted { stages, target_visits, reason } => {
                write!(f, "HorizonExhausted stages={} target_visits={} reason={}", stages, target_visits, reason)
            }
            Verdict::Forfeit { side, reason } => write!(f, "Forfeit side={} reason={}", side, reason),
            Verdict::InvariantFailure { side, reason } => write!(f, "InvariantFailure side={} reason={}", side, reason),
            Verdict::ConfigFault { side, reason } => write!(f, "ConfigFault side={} reason={}", side, reason),
        }
    }
}

fn agent_verdict(side: Side, e: AgentError) -> Verdict {
    match e {
        AgentError::Invariant(reason) => Verdict::InvariantFailure { side, reason },
        AgentError::Config(reason) => Verdict::ConfigFault { side, reason },
    }
}

#[derive(Debug, Clone)]
pub struct MatchOptions {
    pub horizon: usize,
    /// Detect configuration repetition and certify the outcome.
    pub certify: bool,
    pub record: bool,
    /// Cap for the robber-to-cop distances written to the trace.
    pub dist_cap: Option<usize>,
}

impl Default for MatchOptions {
    fn default() -> Self {
        MatchOptions { horizon: 10_000, certify: true, record: true, dist_cap: None }
    }
}

#[derive(Debug, Clone)]
pub struct Negotiated {
    pub params: GameParams,
    pub declarations: Vec<String>,
    pub state: GameState,
}

/// Parameter choices in the order fixed by `order`, then cop and robber placements.
pub fn negotiate(
    g: &Graph,
    order: Order,
    cops: &mut dyn CopAgent,
    robber: &mut dyn RobberAgent,
) -> Result<Negotiated, Verdict> {
    let mut decl = vec![format!("order={}", order)];
    let cop_speed = cops.speed();
    decl.push(format!("cops speed={}", cop_speed));
    let (reach, robber_speed) = match order {
        Order::Weak => {
            let reach = cops.reach(None);
            decl.push(format!("cops reach={}", reach));
            let sr = robber.speed(g, cop_speed, Some(reach)).map_err(|e| agent_verdict(Side::Robber, e))?;
            decl.push(format!("robber speed={}", sr));
            (reach, sr)
        }
        Order::Strong => {
            let sr = robber.speed(g, cop_speed, None).map_err(|e| agent_verdict(Side::Robber, e))?;
            decl.push(format!("robber speed={}", sr));
            let reach = cops.reach(Some(sr));
            decl.push(format!("cops reach={}", reach));
            (reach, sr)
        }
    };
    let objective =
        robber.objective(g, cop_speed, robber_speed, reach).map_err(|e| agent_verdict(Side::Robber, e))?;
    decl.push(format!("robber objective={}", objective));
    let params = GameParams { cops: cops.count(), cop_speed, robber_speed, reach, objective, order };
    if let Err(e) = params.validate(g) {
        let side = if cop_speed < 1 { Side::Cops } else { Side::Robber };
        return Err(Verdict::Forfeit { side, reason: e.to_string() });
    }
    let placed = cops.place(g, &params).map_err(|e| agent_verdict(Side::Cops, e))?;
    let start = robber.place(g, &params, &placed).map_err(|e| agent_verdict(Side::Robber, e))?;
    let state = GameState::initial(g, &params, placed, start).map_err(|e| Verdict::Forfeit {
        side: if g.contains(start) { Side::Cops } else { Side::Robber },
        reason: e.to_string(),
    })?;
    Ok(Negotiated { params, declarations: decl, state })
}

#[derive(Debug, Clone)]
pub struct MatchResult {
    pub params: Option<GameParams>,
    pub trace: Trace,
    pub verdict: Verdict,
    /// Stages played, including any periodicity confirmation.
    pub stages: usize,
    pub cop_counters: Counters,
    pub robber_counters: Counters,
}

type ConfigKey = (Vec<Vertex>, Vertex, Vec<u64>, Vec<u64>);

struct Recorder<'a> {
    g: &'a Graph,
    on: bool,
    cap: usize,
    trace: Trace,
}

impl Recorder<'_> {
    fn push(&mut self, mover: Mover, state: &GameState, path: Vec<Vertex>, notes: Vec<String>) {
        if !self.on {
            return;
        }
        let robber_dists =
            state.cops.iter().map(|&c| self.g.dist_capped(state.robber, c, self.cap).ok().and_then(|d| d.finite())).collect();
        self.trace.records.push(TraceRecord {
            stage: state.stage,
            mover,
            cops: state.cops.clone(),
            robber: state.robber,
            path,
            robber_dists,
            status: state.status,
            notes,
        });
    }
}

/// Plays one match. With deterministic agents the first repetition of the full
/// configuration (positions plus agent memories) proves the play periodic; the
/// period is replayed once more to confirm before a certified verdict is issued.
pub fn run_match(
    g: &Graph,
    order: Order,
    cops: &mut dyn CopAgent,
    robber: &mut dyn RobberAgent,
    opts: &MatchOptions,
) -> MatchResult {
    let mut rec = Recorder { g, on: opts.record, cap: 0, trace: Trace { clamped: g.is_clamped(), ..Trace::default() } };
    let finish = |rec: Recorder, params: Option<GameParams>, verdict: Verdict, stages: usize, cops: &dyn CopAgent, robber: &dyn RobberAgent| {
        let mut trace = rec.trace;
        trace.verdict = verdict.to_string();
        MatchResult { params, trace, verdict, stages, cop_counters: cops.counters(), robber_counters: robber.counters() }
    };
    let neg = match negotiate(g, order, cops, robber) {
        Ok(n) => n,
        Err(v) => return finish(rec, None, v, 0, cops, robber),
    };
    let params = neg.params;
    rec.cap = opts.dist_cap.unwrap_or(2 * (params.reach + params.cop_speed) + 2);
    rec.trace.dist_cap = rec.cap;
    rec.trace.declarations = neg.declarations;
    rec.trace.params = Some(params.clone());
    let mut state = neg.state;
    let mut notes = cops.notes();
    notes.extend(robber.notes());
    rec.push(Mover::Setup, &state, Vec::new(), notes);
    if state.status == Status::Captured {
        return finish(rec, Some(params), Verdict::Captured { stage: 0 }, 0, cops, robber);
    }

    let mask = params.objective.target_mask(g);
    let certify = opts.certify && cops.deterministic() && robber.deterministic();
    let mut seen: HashMap<ConfigKey, usize> = HashMap::new();
    let mut keys: Vec<ConfigKey> = Vec::new();
    let mut starts: Vec<(Vec<Vertex>, Vertex)> = Vec::new();
    let mut afters: Vec<Vec<Vertex>> = Vec::new();
    let mut pending: Option<(usize, usize)> = None;
    let mut visits = 0usize;

    loop {
        let s = state.stage;
        if certify {
            let key = (state.cops.clone(), state.robber, cops.memory(), robber.memory());
            if let Some((first, len)) = pending {
                if keys[s - len] != key {
                    let reason = format!("configuration at stage {} differs from stage {} one period earlier", s, s - len);
                    return finish(rec, Some(params), Verdict::InvariantFailure { side: Side::Engine, reason }, s, cops, robber);
                }
                if s == first + 2 * len {
                    let verdict = certified_verdict(g, &params, &mask, &starts[first..first + len], &afters[first..first + len], first, len);
                    return finish(rec, Some(params), verdict, s, cops, robber);
                }
            } else if let Some(&first) = seen.get(&key) {
                pending = Some((first, s - first));
            } else {
                seen.insert(key.clone(), s);
            }
            keys.push(key);
        }
        if pending.is_none() && s >= opts.horizon {
            let reason = if certify {
                "no repetition within horizon"
            } else if opts.certify {
                "agents not deterministic"
            } else {
                "horizon reached"
            };
            let verdict = Verdict::HorizonExhausted { stages: s, target_visits: visits, reason: reason.into() };
            return finish(rec, Some(params), verdict, s, cops, robber);
        }
        starts.push((state.cops.clone(), state.robber));

        let dest = match cops.step(g, &params, &state) {
            Ok(d) => d,
            Err(e) => return finish(rec, Some(params), agent_verdict(Side::Cops, e), s, cops, robber),
        };
        state = match apply_cop_move(g, &state, &params, &dest) {
            Ok(next) => next,
            Err(e) => {
                let verdict = Verdict::Forfeit { side: Side::Cops, reason: e.to_string() };
                return finish(rec, Some(params), verdict, s, cops, robber);
            }
        };
        afters.push(state.cops.clone());
        rec.push(Mover::Cops, &state, Vec::new(), cops.notes());
        if state.status == Status::Captured {
            return finish(rec, Some(params), Verdict::Captured { stage: state.stage }, state.stage, cops, robber);
        }

        let path = match robber.step(g, &params, &state) {
            Ok(p) => p,
            Err(e) => return finish(rec, Some(params), agent_verdict(Side::Robber, e), state.stage, cops, robber),
        };
        state = match apply_robber_move(g, &state, &params, &path) {
            Ok(next) => next,
            Err(e) => {
                let verdict = Verdict::Forfeit { side: Side::Robber, reason: e.to_string() };
                return finish(rec, Some(params), verdict, state.stage, cops, robber);
            }
        };
        if mask[state.robber] {
            visits += 1;
        }
        rec.push(Mover::Robber, &state, path, robber.notes());
    }
}

fn certified_verdict(
    g: &Graph,
    params: &GameParams,
    mask: &[bool],
    starts: &[(Vec<Vertex>, Vertex)],
    afters: &[Vec<Vertex>],
    first: usize,
    len: usize,
) -> Verdict {
    if matches!(params.objective, Objective::Divergence { .. }) {
        return Verdict::CertifiedRobberWin { period_start: first, period: len };
    }
    if starts.iter().any(|(_, r)| mask[*r]) {
        return Verdict::CertifiedRobberWin { period_start: first, period: len };
    }
    for ((_, r), after) in starts.iter().zip(afters) {
        let reach = robber_reach_from(g, after, *r, params.robber_speed, params.reach);
        if reach.reachable().into_iter().any(|v| mask[v]) {
            return Verdict::HorizonExhausted {
                stages: first + 2 * len,
                target_visits: 0,
                reason: "periodic without target visits but the target stays reachable".into(),
            };
        }
    }
    Verdict::CopObjectiveMet { period_start: first, period: len }
}
