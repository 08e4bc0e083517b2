//! Running the cells of an experiment configuration.

use std::fmt::Write as _;
use std::rc::Rc;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use pursuit::game::{run_match, CopAgent, Counters, GameParams, MatchOptions, MatchResult, Objective, Order, RobberAgent, Verdict};
use pursuit::graph::{Graph, Vertex};
use pursuit::solver::{best_response, haven_of_order, treewidth_exact, DEFAULT_BUDGET};
use pursuit::strategies::{CycleRobber, GridRobber, HavenRobber, HubRobber, RoomLayout, ScriptKind, ScriptedCops, TargetFn, TdCops};

use crate::config::{Cell, ExperimentConfig};
use crate::graphspec::{BuiltGraph, SizeHints};
use crate::{ConfigError, Outcome};

#[derive(Debug, Clone)]
pub struct CellResult {
    pub index: usize,
    pub line: String,
    pub outcome: Outcome,
    /// Concrete graph spec and trace text, when traces were requested.
    pub trace: Option<(String, String)>,
}

/// Counter names that tally failed strategy assertions.
pub fn is_failure_tally(key: &str) -> bool {
    key.ends_with("_failures") || key == "post_relocation_unsafe"
}

fn counters_text(c: &Counters) -> String {
    let parts: Vec<String> = c.iter().map(|(k, v)| format!("{}={}", k, v)).collect();
    format!("{{{}}}", parts.join(","))
}

pub fn classify(res: &MatchResult) -> Outcome {
    let tallies = res.robber_counters.iter().chain(&res.cop_counters).any(|(k, &v)| is_failure_tally(k) && v > 0);
    match res.verdict {
        Verdict::InvariantFailure { .. } | Verdict::Forfeit { .. } => Outcome::Invariant,
        _ if tallies => Outcome::Invariant,
        Verdict::ConfigFault { .. } => Outcome::ConfigFault,
        Verdict::HorizonExhausted { .. } => Outcome::Inconclusive,
        _ => Outcome::Pass,
    }
}

fn script_kind(cell: &Cell, name: &str, intercept: TargetFn) -> Result<ScriptKind, ConfigError> {
    let seed = cell.num("seed", 0)? as u64;
    Ok(match name {
        "greedy" => ScriptKind::Greedy,
        "intercept" => ScriptKind::Intercept(intercept),
        "random" => ScriptKind::Random(seed),
        "random-stream" => ScriptKind::RandomStream(seed),
        "stationary" => ScriptKind::Stationary,
        other => return Err(ConfigError::new(0, format!("unknown cop agent {:?}", other))),
    })
}

/// Targets for intercepting cops: room exits for the room strategy, branch-set centres
/// for the haven strategy, none otherwise (the cops then chase greedily).
fn intercept_targets(cell: &Cell, built: &BuiltGraph, hints: SizeHints) -> TargetFn {
    match cell.get("robber.agent") {
        Some("grid") => {
            let layout = RoomLayout::new(hints.rooms_t.max(1), hints.cop_speed.max(1), hints.reach.max(1), (0, 0));
            Rc::new(move |g: &Graph, v| {
                let Some(w) = g.grid() else { return Vec::new() };
                let (x, y) = w.decode(v);
                layout.room_of(x, y).map(|room| layout.exits(room).into_iter().filter_map(|(a, b)| w.encode(a, b)).collect()).unwrap_or_default()
            })
        }
        Some("haven") => {
            let centers: Vec<Vertex> = built.model.as_ref().map(|m| m.branches.iter().map(|b| b[b.len() / 2]).collect()).unwrap_or_default();
            Rc::new(move |_: &Graph, _| centers.clone())
        }
        _ => Rc::new(|_: &Graph, _| Vec::new()),
    }
}

fn robber_for(cell: &Cell, built: &BuiltGraph) -> Result<Box<dyn RobberAgent>, ConfigError> {
    let g = &built.graph;
    match cell.get("robber.agent").unwrap_or_default() {
        "grid" => {
            if g.grid().is_none() {
                return Err(ConfigError::new(0, "the grid robber needs a grid_window or room_box graph"));
            }
            Ok(Box::new(GridRobber::new(cell.num("robber.t", 1)?, (0, 0))))
        }
        "cycle" => {
            if built.concrete.family != "cycle" {
                return Err(ConfigError::new(0, "the cycle robber needs a cycle graph"));
            }
            Ok(Box::new(CycleRobber::new((0..g.n()).collect())))
        }
        "haven" => {
            let model = built.model.clone().ok_or_else(|| ConfigError::new(0, "the haven robber needs a fat_minor graph"))?;
            let (tw, _) = treewidth_exact(&model.pattern).map_err(|e| ConfigError::new(0, e.to_string()))?;
            let haven = haven_of_order(&model.pattern, tw + 1)
                .map_err(|e| ConfigError::new(0, e.to_string()))?
                .ok_or_else(|| ConfigError::new(0, "pattern has no haven of order tw+1"))?;
            Ok(Box::new(HavenRobber::new(model, haven)))
        }
        "hub" => {
            let (hub, c) = built.hub.as_ref().ok_or_else(|| ConfigError::new(0, "the hub robber needs a hub graph"))?;
            HubRobber::new(hub, *c).map(|r| Box::new(r) as Box<dyn RobberAgent>).map_err(|e| ConfigError::new(0, e.to_string()))
        }
        other => Err(ConfigError::new(0, format!("robber agent {:?} cannot be built here", other))),
    }
}

fn optimal_robber<A: CopAgent + Clone + 'static>(cell: &Cell, g: &Graph, cops: &A) -> Result<Box<dyn RobberAgent>, ConfigError> {
    let objective: Objective = cell
        .get("robber.objective")
        .ok_or_else(|| ConfigError::new(0, "the optimal robber needs robber.objective"))?
        .parse()
        .map_err(|e: String| ConfigError::new(0, e))?;
    let robber_speed = match cell.get("robber.speed") {
        None | Some("auto") => g.n(),
        Some(_) => cell.num("robber.speed", 1)?,
    };
    let mut probe = cops.clone();
    let order: Order = cell.get("order").unwrap_or("weak").parse().map_err(|e: String| ConfigError::new(0, e))?;
    let params = GameParams { cops: probe.count(), cop_speed: probe.speed(), robber_speed, reach: probe.reach(Some(robber_speed)), objective, order };
    let budget = cell.num("budget", DEFAULT_BUDGET)?;
    best_response(g, &params, cops, budget).map(|r| Box::new(r) as Box<dyn RobberAgent>).map_err(|e| ConfigError::new(0, format!("solver: {}", e)))
}

fn setup_and_play(cell: &Cell, record: bool) -> Result<(MatchResult, String), ConfigError> {
    let hints = SizeHints {
        cops: cell.num("cops.count", 1)?,
        cop_speed: cell.num("cops.speed", 1)?,
        reach: cell.num("cops.reach", 1)?,
        rooms_t: cell.num("robber.t", 1)?,
    };
    let built = cell.graph_spec().build(hints)?;
    let g = &built.graph;
    let order: Order = cell.get("order").unwrap_or("weak").parse().map_err(|e: String| ConfigError::new(0, e))?;
    let opts = MatchOptions {
        horizon: cell.num("horizon", 10_000)?,
        certify: cell.get("certify").is_none_or(|v| v == "true"),
        record,
        dist_cap: None,
    };
    let cop_name = cell.get("cops.agent").unwrap_or_default();
    let optimal = cell.get("robber.agent") == Some("optimal");
    let res = if cop_name == "td" {
        let decomp = match &built.decomposition {
            Some(d) => d.clone(),
            None => treewidth_exact(g).map_err(|e| ConfigError::new(0, format!("td cops need a decomposition: {}", e)))?.1,
        };
        let mut cops = TdCops::new(decomp);
        let mut robber = if optimal { optimal_robber(cell, g, &cops)? } else { robber_for(cell, &built)? };
        run_match(g, order, &mut cops, robber.as_mut(), &opts)
    } else {
        let kind = script_kind(cell, cop_name, intercept_targets(cell, &built, hints))?;
        let mut cops = ScriptedCops::new(kind, hints.cops, hints.cop_speed, hints.reach);
        let mut robber = if optimal { optimal_robber(cell, g, &cops)? } else { robber_for(cell, &built)? };
        run_match(g, order, &mut cops, robber.as_mut(), &opts)
    };
    Ok((res, built.concrete.to_string()))
}

pub fn run_cell(cell: &Cell, record: bool) -> CellResult {
    match setup_and_play(cell, record) {
        Ok((res, spec)) => {
            let line = format!(
                "cell {} {}: {} stages={} cop_counters={} robber_counters={}",
                cell.index,
                cell.label(),
                res.verdict,
                res.stages,
                counters_text(&res.cop_counters),
                counters_text(&res.robber_counters)
            );
            let trace = record.then(|| (spec, res.trace.to_text()));
            CellResult { index: cell.index, line, outcome: classify(&res), trace }
        }
        Err(e) => CellResult { index: cell.index, line: format!("cell {} {}: config fault: {}", cell.index, cell.label(), e.msg), outcome: Outcome::ConfigFault, trace: None },
    }
}

/// Runs every cell on up to `workers` threads; results come back in cell order.
pub fn run_config(cfg: &ExperimentConfig, workers: usize, record: bool) -> Vec<CellResult> {
    let cells = cfg.cells();
    let next = AtomicUsize::new(0);
    let out = Mutex::new(Vec::with_capacity(cells.len()));
    std::thread::scope(|scope| {
        for _ in 0..workers.clamp(1, cells.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(cell) = cells.get(i) else { break };
                let r = run_cell(cell, record);
                out.lock().expect("result lock").push(r);
            });
        }
    });
    let mut results = out.into_inner().expect("result lock");
    results.sort_by_key(|r| r.index);
    results
}

/// Text report for a configuration run. Contains no timing, so it is reproducible.
pub fn report(results: &[CellResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "cells {}", results.len());
    for r in results {
        let _ = writeln!(out, "{}", r.line);
    }
    let count = |o: Outcome| results.iter().filter(|r| r.outcome == o).count();
    let _ = writeln!(
        out,
        "summary pass={} invariant_failures={} inconclusive={} config_faults={}",
        count(Outcome::Pass),
        count(Outcome::Invariant),
        count(Outcome::Inconclusive),
        count(Outcome::ConfigFault)
    );
    out
}
