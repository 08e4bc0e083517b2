//! Rules of the weak and strong games: parameters, legality, capture and objectives.

mod agent;
mod engine;
mod trace;

pub use agent::{AgentError, CopAgent, Counters, RobberAgent};
pub use engine::{negotiate, run_match, MatchOptions, MatchResult, Negotiated, Side, Verdict};
pub use trace::{replay, Mover, ReplayError, Trace, TraceParseError, TraceRecord};

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::graph::{Graph, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    /// Cops pick speed and reach, then the robber picks speed and objective.
    Weak,
    /// Cops pick speed, robber picks speed, cops pick reach, robber picks objective.
    Strong,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Order::Weak => "weak",
            Order::Strong => "strong",
        })
    }
}

impl std::str::FromStr for Order {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "weak" => Ok(Order::Weak),
            "strong" => Ok(Order::Strong),
            other => Err(format!("unknown order {:?}", other)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Objective {
    ProtectBall { center: Vertex, radius: usize },
    Divergence { center: Vertex },
    ProtectFinite(Vec<Vertex>),
}

impl Objective {
    pub fn validate(&self, g: &Graph) -> Result<(), RuleViolation> {
        let bad = |msg: String| Err(RuleViolation::BadObjective(msg));
        match self {
            Objective::ProtectBall { center, radius } => {
                if *radius < 1 {
                    return bad("ball radius must be at least 1".into());
                }
                if !g.contains(*center) {
                    return bad(format!("center {} outside the window", center));
                }
            }
            Objective::Divergence { center } => {
                if !g.contains(*center) {
                    return bad(format!("center {} outside the window", center));
                }
            }
            Objective::ProtectFinite(set) => {
                if set.is_empty() {
                    return bad("protected set is empty".into());
                }
                if let Some(v) = set.iter().find(|&&v| !g.contains(v)) {
                    return bad(format!("vertex {} outside the window", v));
                }
            }
        }
        Ok(())
    }

    /// Membership mask of the vertices the robber wants to keep visiting.
    /// For divergence this is empty: any bounded periodic play already defeats it.
    pub fn target_mask(&self, g: &Graph) -> Vec<bool> {
        let mut mask = vec![false; g.n()];
        match self {
            Objective::ProtectBall { center, radius } => {
                for (v, d) in g.distance_field(&[*center], *radius).into_iter().enumerate() {
                    mask[v] = d.is_some();
                }
            }
            Objective::Divergence { .. } => {}
            Objective::ProtectFinite(set) => {
                for &v in set {
                    mask[v] = true;
                }
            }
        }
        mask
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::ProtectBall { center, radius } => write!(f, "ball(center={},radius={})", center, radius),
            Objective::Divergence { center } => write!(f, "divergence(center={})", center),
            Objective::ProtectFinite(set) => {
                let parts: Vec<String> = set.iter().map(|v| v.to_string()).collect();
                write!(f, "finite({})", parts.join(","))
            }
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = String;

    /// Inverse of the `Display` form: `ball(center=C,radius=R)`, `divergence(center=C)`, `finite(a,b,..)`.
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let (head, rest) = s.split_once('(').ok_or_else(|| format!("bad objective {:?}", s))?;
        let body = rest.strip_suffix(')').ok_or_else(|| format!("bad objective {:?}", s))?;
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad number {:?} in objective", t));
        let field = |key: &str| -> Result<usize, String> {
            body.split(',')
                .find_map(|kv| kv.trim().strip_prefix(key).and_then(|r| r.strip_prefix('=')))
                .ok_or_else(|| format!("objective {:?} lacks {}", s, key))
                .and_then(num)
        };
        match head.trim() {
            "ball" => Ok(Objective::ProtectBall { center: field("center")?, radius: field("radius")? }),
            "divergence" => Ok(Objective::Divergence { center: field("center")? }),
            "finite" => body.split(',').filter(|t| !t.trim().is_empty()).map(num).collect::<Result<_, _>>().map(Objective::ProtectFinite),
            other => Err(format!("unknown objective {:?}", other)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameParams {
    pub cops: usize,
    pub cop_speed: usize,
    pub robber_speed: usize,
    pub reach: usize,
    pub objective: Objective,
    pub order: Order,
}

impl GameParams {
    pub fn validate(&self, g: &Graph) -> Result<(), RuleViolation> {
        if self.cop_speed < 1 {
            return Err(RuleViolation::BadSpeed { side: "cops", speed: self.cop_speed });
        }
        if self.robber_speed < 1 {
            return Err(RuleViolation::BadSpeed { side: "robber", speed: self.robber_speed });
        }
        self.objective.validate(g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    CopsToMove,
    RobberToMove,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Running,
    Captured,
    CertifiedRobberWin,
    CopObjectiveMet,
    HorizonExhausted,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Running => "Running",
            Status::Captured => "Captured",
            Status::CertifiedRobberWin => "CertifiedRobberWin",
            Status::CopObjectiveMet => "CopObjectiveMet",
            Status::HorizonExhausted => "HorizonExhausted",
        })
    }
}

impl std::str::FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "Running" => Ok(Status::Running),
            "Captured" => Ok(Status::Captured),
            "CertifiedRobberWin" => Ok(Status::CertifiedRobberWin),
            "CopObjectiveMet" => Ok(Status::CopObjectiveMet),
            "HorizonExhausted" => Ok(Status::HorizonExhausted),
            other => Err(format!("unknown status {:?}", other)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameState {
    pub stage: usize,
    pub cops: Vec<Vertex>,
    pub robber: Vertex,
    pub phase: Phase,
    pub status: Status,
}

impl GameState {
    /// State right after placements; captured at once if the robber starts within reach.
    pub fn initial(g: &Graph, params: &GameParams, cops: Vec<Vertex>, robber: Vertex) -> Result<Self, RuleViolation> {
        if cops.len() != params.cops {
            return Err(RuleViolation::WrongCopCount { expected: params.cops, got: cops.len() });
        }
        for &c in cops.iter().chain(std::iter::once(&robber)) {
            if !g.contains(c) {
                return Err(RuleViolation::OutOfWindow(c));
            }
        }
        let captured = threat(g, &cops, robber, params.reach).is_some();
        Ok(GameState {
            stage: 0,
            cops,
            robber,
            phase: Phase::CopsToMove,
            status: if captured { Status::Captured } else { Status::Running },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleViolation {
    #[error("move attempted in the wrong phase")]
    WrongPhase,
    #[error("game is over")]
    NotRunning,
    #[error("expected {expected} cop positions, got {got}")]
    WrongCopCount { expected: usize, got: usize },
    #[error("vertex {0} is outside the window")]
    OutOfWindow(Vertex),
    #[error("cop {cop} moved from {from} to {to}, farther than speed {speed}")]
    CopTooFast { cop: usize, from: Vertex, to: Vertex, speed: usize },
    #[error("robber path does not start at the robber's vertex {0}")]
    PathStart(Vertex),
    #[error("robber path breaks between {0} and {1}")]
    PathBroken(Vertex, Vertex),
    #[error("robber path of length {len} exceeds speed {speed}")]
    PathTooLong { len: usize, speed: usize },
    #[error("robber path vertex {vertex} is within reach of cop {cop}")]
    Forbidden { vertex: Vertex, cop: usize },
    #[error("{side} declared speed {speed}; speeds must be at least 1")]
    BadSpeed { side: &'static str, speed: usize },
    #[error("bad objective: {0}")]
    BadObjective(String),
}

/// Index of the lowest cop within `reach` of `v`, if any.
pub fn threat(g: &Graph, cops: &[Vertex], v: Vertex, reach: usize) -> Option<usize> {
    cops.iter().position(|&c| g.dist_capped(c, v, reach).map(|d| d.within(reach)).unwrap_or(false))
}

/// Vertices within `reach` of some cop; the robber may not use them.
pub fn forbidden_set(g: &Graph, cops: &[Vertex], reach: usize) -> HashSet<Vertex> {
    if cops.is_empty() {
        return HashSet::new();
    }
    g.multi_source_dist_capped(cops, reach).map(|m| m.into_keys().collect()).unwrap_or_default()
}

pub fn legal_cop_move(g: &Graph, state: &GameState, params: &GameParams, dest: &[Vertex]) -> Result<(), RuleViolation> {
    if state.status != Status::Running {
        return Err(RuleViolation::NotRunning);
    }
    if state.phase != Phase::CopsToMove {
        return Err(RuleViolation::WrongPhase);
    }
    if dest.len() != state.cops.len() {
        return Err(RuleViolation::WrongCopCount { expected: state.cops.len(), got: dest.len() });
    }
    for (j, (&from, &to)) in state.cops.iter().zip(dest).enumerate() {
        if !g.contains(to) {
            return Err(RuleViolation::OutOfWindow(to));
        }
        if !g.dist_capped(from, to, params.cop_speed).map_err(|_| RuleViolation::OutOfWindow(from))?.within(params.cop_speed) {
            return Err(RuleViolation::CopTooFast { cop: j, from, to, speed: params.cop_speed });
        }
    }
    Ok(())
}

pub fn apply_cop_move(g: &Graph, state: &GameState, params: &GameParams, dest: &[Vertex]) -> Result<GameState, RuleViolation> {
    legal_cop_move(g, state, params, dest)?;
    let captured = threat(g, dest, state.robber, params.reach).is_some();
    Ok(GameState {
        stage: state.stage + 1,
        cops: dest.to_vec(),
        robber: state.robber,
        phase: Phase::RobberToMove,
        status: if captured { Status::Captured } else { Status::Running },
    })
}

/// Vertices the robber can reach this turn, with BFS parents for witness paths.
#[derive(Debug, Clone)]
pub struct RobberReach {
    origin: Vertex,
    parent: HashMap<Vertex, Vertex>,
    dist: HashMap<Vertex, usize>,
}

impl RobberReach {
    pub fn contains(&self, v: Vertex) -> bool {
        self.dist.contains_key(&v)
    }

    pub fn reachable(&self) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = self.dist.keys().copied().collect();
        out.sort_unstable();
        out
    }

    pub fn distance(&self, v: Vertex) -> Option<usize> {
        self.dist.get(&v).copied()
    }

    /// A shortest legal path from the robber's vertex to `v`.
    pub fn path_to(&self, v: Vertex) -> Option<Vec<Vertex>> {
        if !self.contains(v) {
            return None;
        }
        let mut path = vec![v];
        let mut cur = v;
        while cur != self.origin {
            cur = self.parent[&cur];
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }
}

/// Reachable set for a robber at `from` with the given cops, speed and reach.
pub fn robber_reach_from(g: &Graph, cops: &[Vertex], from: Vertex, speed: usize, reach: usize) -> RobberReach {
    let forbidden = forbidden_set(g, cops, reach);
    let mut parent = HashMap::new();
    let mut dist = HashMap::new();
    if !forbidden.contains(&from) {
        dist.insert(from, 0);
        let mut layer = vec![from];
        for d in 1..=speed {
            let mut next = Vec::new();
            for &x in &layer {
                for &y in g.adj(x) {
                    if !forbidden.contains(&y) && !dist.contains_key(&y) {
                        dist.insert(y, d);
                        parent.insert(y, x);
                        next.push(y);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            next.sort_unstable();
            layer = next;
        }
    }
    RobberReach { origin: from, parent, dist }
}

pub fn legal_robber_paths(g: &Graph, state: &GameState, params: &GameParams) -> Result<RobberReach, RuleViolation> {
    if state.status != Status::Running {
        return Err(RuleViolation::NotRunning);
    }
    if state.phase != Phase::RobberToMove {
        return Err(RuleViolation::WrongPhase);
    }
    Ok(robber_reach_from(g, &state.cops, state.robber, params.robber_speed, params.reach))
}

/// Checks a robber path vertex by vertex against each cop separately.
pub fn validate_robber_path(
    g: &Graph,
    cops: &[Vertex],
    from: Vertex,
    path: &[Vertex],
    speed: usize,
    reach: usize,
) -> Result<(), RuleViolation> {
    if path.first() != Some(&from) {
        return Err(RuleViolation::PathStart(from));
    }
    if path.len() - 1 > speed {
        return Err(RuleViolation::PathTooLong { len: path.len() - 1, speed });
    }
    for w in path.windows(2) {
        if !g.has_edge(w[0], w[1]) {
            return Err(RuleViolation::PathBroken(w[0], w[1]));
        }
    }
    for &v in path {
        if !g.contains(v) {
            return Err(RuleViolation::OutOfWindow(v));
        }
        if let Some(cop) = threat(g, cops, v, reach) {
            return Err(RuleViolation::Forbidden { vertex: v, cop });
        }
    }
    Ok(())
}

pub fn apply_robber_move(g: &Graph, state: &GameState, params: &GameParams, path: &[Vertex]) -> Result<GameState, RuleViolation> {
    if state.status != Status::Running {
        return Err(RuleViolation::NotRunning);
    }
    if state.phase != Phase::RobberToMove {
        return Err(RuleViolation::WrongPhase);
    }
    let forbidden = forbidden_set(g, &state.cops, params.reach);
    if path.first() != Some(&state.robber) {
        return Err(RuleViolation::PathStart(state.robber));
    }
    if path.len() - 1 > params.robber_speed {
        return Err(RuleViolation::PathTooLong { len: path.len() - 1, speed: params.robber_speed });
    }
    for (i, &v) in path.iter().enumerate() {
        if !g.contains(v) {
            return Err(RuleViolation::OutOfWindow(v));
        }
        if i > 0 && !g.has_edge(path[i - 1], v) {
            return Err(RuleViolation::PathBroken(path[i - 1], v));
        }
        if forbidden.contains(&v) {
            let cop = threat(g, &state.cops, v, params.reach).unwrap_or(0);
            return Err(RuleViolation::Forbidden { vertex: v, cop });
        }
    }
    Ok(GameState {
        stage: state.stage,
        cops: state.cops.clone(),
        robber: *path.last().unwrap(),
        phase: Phase::CopsToMove,
        status: Status::Running,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families;

    fn params(k: usize, sc: usize, sr: usize, reach: usize) -> GameParams {
        GameParams {
            cops: k,
            cop_speed: sc,
            robber_speed: sr,
            reach,
            objective: Objective::ProtectBall { center: 0, radius: 1 },
            order: Order::Weak,
        }
    }

    #[test]
    fn cop_speed_limits() {
        let g = families::path(6).unwrap();
        let s = GameState::initial(&g, &params(2, 2, 1, 0), vec![0, 1], 5).unwrap();
        assert!(legal_cop_move(&g, &s, &params(2, 2, 1, 0), &[2, 1]).is_ok());
        let p1 = params(2, 1, 1, 0);
        assert!(matches!(legal_cop_move(&g, &s, &p1, &[2, 1]), Err(RuleViolation::CopTooFast { cop: 0, .. })));
        assert!(matches!(legal_cop_move(&g, &s, &p1, &[1, 3]), Err(RuleViolation::CopTooFast { cop: 1, .. })));
    }

    #[test]
    fn capture_by_reach() {
        let g = families::path(6).unwrap();
        let s = GameState::initial(&g, &params(1, 1, 1, 1), vec![0], 3).unwrap();
        assert_eq!(apply_cop_move(&g, &s, &params(1, 1, 1, 1), &[1]).unwrap().status, Status::Running);
        let s = GameState::initial(&g, &params(1, 1, 1, 1), vec![1], 3).unwrap();
        assert_eq!(apply_cop_move(&g, &s, &params(1, 1, 1, 1), &[2]).unwrap().status, Status::Captured);
        assert_eq!(apply_cop_move(&g, &s, &params(1, 1, 1, 0), &[2]).unwrap().status, Status::Running);
        let grid = families::grid_window(-3, 3, -3, 3).unwrap();
        let w = grid.grid().unwrap();
        let p = params(1, 1, 1, 2);
        let s = GameState::initial(&grid, &p, vec![w.encode(-1, 0).unwrap()], w.encode(1, 1).unwrap()).unwrap();
        assert_eq!(apply_cop_move(&grid, &s, &p, &[w.encode(0, 0).unwrap()]).unwrap().status, Status::Captured);
    }

    #[test]
    fn placement_within_reach_is_captured() {
        let g = families::path(6).unwrap();
        let s = GameState::initial(&g, &params(1, 1, 1, 1), vec![2], 3).unwrap();
        assert_eq!(s.status, Status::Captured);
    }

    #[test]
    fn robber_reach_without_cops_is_ball() {
        let g = families::grid_window(-6, 6, -6, 6).unwrap();
        let o = g.grid().unwrap().encode(0, 0).unwrap();
        let r = robber_reach_from(&g, &[], o, 3, 1);
        assert_eq!(r.reachable(), g.ball(o, 3, false).unwrap());
    }

    #[test]
    fn robber_blocked_on_path() {
        let g = families::path(9).unwrap();
        // cop at 6 with reach 1 forbids 5, 6, 7
        let r = robber_reach_from(&g, &[6], 3, 5, 1);
        assert_eq!(r.reachable(), vec![0, 1, 2, 3, 4]);
        let r = robber_reach_from(&g, &[6], 8, 5, 1);
        assert_eq!(r.reachable(), vec![8]);
    }

    #[test]
    fn robber_path_rules() {
        let g = families::path(9).unwrap();
        let p = params(1, 1, 3, 1);
        let s = GameState { stage: 1, cops: vec![6], robber: 3, phase: Phase::RobberToMove, status: Status::Running };
        assert!(apply_robber_move(&g, &s, &p, &[3, 2, 1, 0]).is_ok());
        assert_eq!(apply_robber_move(&g, &s, &p, &[3, 4, 5]).unwrap_err(), RuleViolation::Forbidden { vertex: 5, cop: 0 });
        assert!(matches!(apply_robber_move(&g, &s, &p, &[3, 2, 1, 0, 1]), Err(RuleViolation::PathTooLong { .. })));
        assert_eq!(apply_robber_move(&g, &s, &p, &[3, 1]).unwrap_err(), RuleViolation::PathBroken(3, 1));
        let after = apply_robber_move(&g, &s, &p, &[3]).unwrap();
        assert_eq!(after.phase, Phase::CopsToMove);
        assert_eq!(apply_robber_move(&g, &after, &p, &[3]).unwrap_err(), RuleViolation::WrongPhase);
    }

    #[test]
    fn objectives_validate() {
        let g = families::cycle(5).unwrap();
        assert!(Objective::ProtectBall { center: 0, radius: 0 }.validate(&g).is_err());
        assert!(Objective::ProtectFinite(vec![]).validate(&g).is_err());
        assert!(Objective::Divergence { center: 9 }.validate(&g).is_err());
        let mask = Objective::ProtectBall { center: 0, radius: 1 }.target_mask(&g);
        assert_eq!(mask, vec![true, true, false, false, true]);
    }
}
