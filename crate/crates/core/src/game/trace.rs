use std::fmt::Write as _;

use super::{apply_cop_move, apply_robber_move, validate_robber_path, GameParams, GameState, Objective, Order, RuleViolation, Status};
use crate::graph::{Graph, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mover {
    Setup,
    Cops,
    Robber,
}

/// One half-stage of play.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub stage: usize,
    pub mover: Mover,
    pub cops: Vec<Vertex>,
    pub robber: Vertex,
    pub path: Vec<Vertex>,
    /// Robber-to-cop distances, `None` when beyond the trace cap.
    pub robber_dists: Vec<Option<usize>>,
    pub status: Status,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct Trace {
    pub declarations: Vec<String>,
    pub params: Option<GameParams>,
    pub records: Vec<TraceRecord>,
    pub dist_cap: usize,
    pub clamped: bool,
    pub verdict: String,
}

fn join(vs: &[Vertex]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn split_list(s: &str) -> Result<Vec<Vertex>, String> {
    s.split(',').filter(|t| !t.is_empty()).map(|t| t.parse().map_err(|_| format!("bad vertex {:?}", t))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("trace line {line}: {msg}")]
pub struct TraceParseError {
    pub line: usize,
    pub msg: String,
}

impl Trace {
    /// Line-delimited text form; stable for identical plays.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for d in &self.declarations {
            let _ = writeln!(out, "declare {}", d);
        }
        if let Some(p) = &self.params {
            let _ = writeln!(
                out,
                "params cops={} cop_speed={} robber_speed={} reach={} order={} objective={}",
                p.cops, p.cop_speed, p.robber_speed, p.reach, p.order, p.objective
            );
        }
        if self.clamped {
            let _ = writeln!(out, "window clamped=true");
        }
        for r in &self.records {
            let mover = match r.mover {
                Mover::Setup => "setup",
                Mover::Cops => "cops",
                Mover::Robber => "robber",
            };
            let dists: Vec<String> = r
                .robber_dists
                .iter()
                .map(|d| match d {
                    Some(d) => d.to_string(),
                    None => format!(">{}", self.dist_cap),
                })
                .collect();
            let _ = write!(
                out,
                "stage={} mover={} cops={} robber={} path={} dist={} status={}",
                r.stage,
                mover,
                join(&r.cops),
                r.robber,
                join(&r.path),
                dists.join(","),
                r.status
            );
            for n in &r.notes {
                let _ = write!(out, " note={}", n.replace(' ', "_"));
            }
            out.push('\n');
        }
        if !self.verdict.is_empty() {
            let _ = writeln!(out, "verdict {}", self.verdict);
        }
        out
    }

    /// Reads the form written by [`Trace::to_text`]. Lines starting with `#` are skipped and
    /// notes come back with underscores for spaces.
    pub fn parse(text: &str) -> Result<Trace, TraceParseError> {
        let mut t = Trace::default();
        for (i, raw) in text.lines().enumerate() {
            let fail = |msg: String| TraceParseError { line: i + 1, msg };
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(d) = line.strip_prefix("declare ") {
                t.declarations.push(d.to_string());
            } else if let Some(v) = line.strip_prefix("verdict ") {
                t.verdict = v.to_string();
            } else if line == "window clamped=true" {
                t.clamped = true;
            } else if let Some(rest) = line.strip_prefix("params ") {
                t.params = Some(parse_params(rest).map_err(fail)?);
            } else if line.starts_with("stage=") {
                let r = parse_record(line, &mut t.dist_cap).map_err(fail)?;
                t.records.push(r);
            } else {
                return Err(fail(format!("unrecognized line {:?}", line)));
            }
        }
        Ok(t)
    }

    /// Robber positions at the end of every half-stage, including path interiors.
    pub fn robber_vertices(&self) -> Vec<Vertex> {
        let mut out = Vec::new();
        for r in &self.records {
            if r.path.is_empty() {
                out.push(r.robber);
            } else {
                out.extend_from_slice(&r.path);
            }
        }
        out
    }
}

fn fields(line: &str) -> impl Iterator<Item = (&str, &str)> {
    line.split(' ').filter_map(|kv| kv.split_once('='))
}

fn parse_params(rest: &str) -> Result<GameParams, String> {
    let mut p = GameParams {
        cops: 0,
        cop_speed: 0,
        robber_speed: 0,
        reach: 0,
        objective: Objective::Divergence { center: 0 },
        order: Order::Weak,
    };
    let num = |v: &str| v.parse::<usize>().map_err(|_| format!("bad number {:?}", v));
    for (k, v) in fields(rest) {
        match k {
            "cops" => p.cops = num(v)?,
            "cop_speed" => p.cop_speed = num(v)?,
            "robber_speed" => p.robber_speed = num(v)?,
            "reach" => p.reach = num(v)?,
            "order" => p.order = v.parse()?,
            "objective" => p.objective = v.parse()?,
            other => return Err(format!("unknown parameter {:?}", other)),
        }
    }
    Ok(p)
}

fn parse_record(line: &str, dist_cap: &mut usize) -> Result<TraceRecord, String> {
    let mut r = TraceRecord {
        stage: 0,
        mover: Mover::Setup,
        cops: Vec::new(),
        robber: 0,
        path: Vec::new(),
        robber_dists: Vec::new(),
        status: Status::Running,
        notes: Vec::new(),
    };
    for (k, v) in fields(line) {
        match k {
            "stage" => r.stage = v.parse().map_err(|_| format!("bad stage {:?}", v))?,
            "mover" => {
                r.mover = match v {
                    "setup" => Mover::Setup,
                    "cops" => Mover::Cops,
                    "robber" => Mover::Robber,
                    _ => return Err(format!("bad mover {:?}", v)),
                }
            }
            "cops" => r.cops = split_list(v)?,
            "robber" => r.robber = v.parse().map_err(|_| format!("bad robber {:?}", v))?,
            "path" => r.path = split_list(v)?,
            "dist" => {
                for d in v.split(',').filter(|d| !d.is_empty()) {
                    if let Some(cap) = d.strip_prefix('>') {
                        *dist_cap = cap.parse().map_err(|_| format!("bad distance {:?}", d))?;
                        r.robber_dists.push(None);
                    } else {
                        r.robber_dists.push(Some(d.parse().map_err(|_| format!("bad distance {:?}", d))?));
                    }
                }
            }
            "status" => r.status = v.parse()?,
            "note" => r.notes.push(v.to_string()),
            other => return Err(format!("unknown field {:?}", other)),
        }
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("trace has no parameters or setup record")]
    Incomplete,
    #[error("record {index}: {violation}")]
    Illegal { index: usize, violation: RuleViolation },
    #[error("record {index}: recorded status {recorded}, replay gives {replayed}")]
    StatusMismatch { index: usize, recorded: Status, replayed: Status },
}

/// Re-runs every recorded move through the rules and returns the status sequence.
pub fn replay(g: &Graph, trace: &Trace) -> Result<Vec<Status>, ReplayError> {
    let params = trace.params.as_ref().ok_or(ReplayError::Incomplete)?;
    let first = trace.records.first().ok_or(ReplayError::Incomplete)?;
    if first.mover != Mover::Setup {
        return Err(ReplayError::Incomplete);
    }
    let mut state = GameState::initial(g, params, first.cops.clone(), first.robber)
        .map_err(|violation| ReplayError::Illegal { index: 0, violation })?;
    let mut statuses = vec![state.status];
    check(0, first.status, state.status)?;
    for (index, r) in trace.records.iter().enumerate().skip(1) {
        state = match r.mover {
            Mover::Cops => apply_cop_move(g, &state, params, &r.cops),
            Mover::Robber => {
                validate_robber_path(g, &state.cops, state.robber, &r.path, params.robber_speed, params.reach)
                    .and_then(|_| apply_robber_move(g, &state, params, &r.path))
            }
            Mover::Setup => Err(RuleViolation::WrongPhase),
        }
        .map_err(|violation| ReplayError::Illegal { index, violation })?;
        check(index, r.status, state.status)?;
        statuses.push(state.status);
    }
    Ok(statuses)
}

fn check(index: usize, recorded: Status, replayed: Status) -> Result<(), ReplayError> {
    if recorded == replayed {
        Ok(())
    } else {
        Err(ReplayError::StatusMismatch { index, recorded, replayed })
    }
}
