//! `solve`, `verify`, `replay` and `suite`. Each returns its text output and outcome.

use std::fmt::Write as _;

use pursuit::game::{replay, GameParams, Objective, Order, ReplayError, Trace};
use pursuit::geometry::{build_fat_minor_grid, simulate_transfer, verify_fat_minor, verify_qi_embedding, FatMinorModel, QiEmbedding, TransferConstants, Wanderer};
use pursuit::graph::families::square_grid;
use pursuit::graph::TreeDecomposition;
use pursuit::solver::{build_arena, copwin, delta_hyperbolicity_slim, haven_of_order, solve_buchi, target_states, treewidth_exact, GameGraph, SolverError, Winner, WinningSets};
use pursuit::suite::{run_suite, SUITES};

use crate::graphspec::{parse_pattern, GraphSpec, SizeHints};
use crate::{ConfigError, Outcome};

pub type CommandResult = Result<(String, Outcome), ConfigError>;

fn read(path: &str) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|e| ConfigError::new(0, format!("cannot read {}: {}", path, e)))
}

fn write(path: &str, text: &str) -> Result<(), ConfigError> {
    std::fs::write(path, text).map_err(|e| ConfigError::new(0, format!("cannot write {}: {}", path, e)))
}

fn build(spec: &str) -> Result<pursuit::graph::Graph, ConfigError> {
    Ok(GraphSpec::parse(spec)?.build(SizeHints::default())?.graph)
}

pub struct SolveArgs {
    pub graph: String,
    pub cops: usize,
    pub cop_speed: usize,
    pub robber_speed: usize,
    pub reach: usize,
    pub objective: String,
    pub order: String,
    pub budget: usize,
    pub table: Option<String>,
    pub strategy: Option<String>,
}

fn strategy_text(arena: &pursuit::solver::Arena, sets: &WinningSets) -> String {
    let mut out = String::new();
    for id in 0..sets.winner.len() {
        let next = sets.robber_move[id].or(sets.cop_move[id]);
        if let Some(t) = next {
            let (a, b) = (arena.state(id), arena.state(t));
            let _ = writeln!(out, "{} cops={:?} robber={} -> {} cops={:?} robber={}", id, a.cops, a.robber, t, b.cops, b.robber);
        }
    }
    out
}

pub fn solve(a: &SolveArgs) -> CommandResult {
    let g = build(&a.graph)?;
    let objective: Objective = a.objective.parse().map_err(|e: String| ConfigError::new(0, e))?;
    let order: Order = a.order.parse().map_err(|e: String| ConfigError::new(0, e))?;
    let params = GameParams { cops: a.cops, cop_speed: a.cop_speed, robber_speed: a.robber_speed, reach: a.reach, objective, order };
    let arena = match build_arena(&g, &params, a.budget) {
        Ok(x) => x,
        Err(e @ SolverError::Budget { .. }) => return Ok((format!("budget exceeded: {}\n", e), Outcome::Inconclusive)),
        Err(e) => return Err(ConfigError::new(0, e.to_string())),
    };
    let sets = solve_buchi(&arena, &target_states(&arena));
    let cops_win = copwin(&g, &params, a.budget).map_err(|e| ConfigError::new(0, e.to_string()))?;
    let mut out = String::new();
    let _ = writeln!(out, "graph {} vertices={} edges={}", a.graph, g.n(), g.edge_count());
    let _ = writeln!(out, "params cops={} cop_speed={} robber_speed={} reach={} order={} objective={}", a.cops, a.cop_speed, a.robber_speed, a.reach, order, params.objective);
    let _ = writeln!(out, "states {} robber_wins={} cop_wins={}", arena.num_states(), sets.count(Winner::Robber), sets.count(Winner::Cops));
    let _ = writeln!(out, "winner {}", if cops_win { "cops" } else { "robber" });
    if let Some(p) = &a.table {
        write(p, &sets.to_table(&arena))?;
    }
    if let Some(p) = &a.strategy {
        write(p, &strategy_text(&arena, &sets))?;
    }
    Ok((out, Outcome::Pass))
}

pub struct FatMinorArgs {
    pub model: Option<String>,
    pub pattern: Option<String>,
    pub fatness: Option<usize>,
    pub margin: usize,
    /// Verify against this fatness instead of the model's own.
    pub claim: Option<usize>,
    pub write: Option<String>,
}

pub fn verify_fatminor(a: &FatMinorArgs) -> CommandResult {
    let mut model = match (&a.model, &a.pattern) {
        (Some(p), _) => FatMinorModel::parse(&read(p)?).map_err(|e| ConfigError::new(0, e.to_string()))?,
        (None, Some(pat)) => {
            let fatness = a.fatness.ok_or_else(|| ConfigError::new(0, "--fatness is required with --pattern"))?;
            build_fat_minor_grid(parse_pattern(pat)?, fatness, a.margin).map_err(|e| ConfigError::new(0, e.to_string()))?
        }
        (None, None) => return Err(ConfigError::new(0, "give --model FILE or --pattern NAME")),
    };
    if let Some(p) = &a.write {
        write(p, &model.to_text())?;
    }
    if let Some(d) = a.claim {
        model.fatness = d;
    }
    let report = verify_fat_minor(&model);
    let out = format!("fat minor: pattern {} vertices, host {} vertices, fatness {}\n{}\n", model.pattern.n(), model.host.n(), model.fatness, report);
    Ok((out, if report.passed() { Outcome::Pass } else { Outcome::Invariant }))
}

pub struct QiArgs {
    pub builtin: Option<String>,
    pub source: Option<String>,
    pub target: Option<String>,
    pub map: Option<String>,
    pub pairs: usize,
    pub seed: u64,
    pub simulate: usize,
}

pub fn verify_qi(a: &QiArgs) -> CommandResult {
    let geo = |e: pursuit::geometry::GeometryError| ConfigError::new(0, e.to_string());
    let emb = match a.builtin.as_deref() {
        Some("path-row") => QiEmbedding::path_row(120, 20, 120).map_err(geo)?,
        Some("subdivision") => QiEmbedding::subdivision(square_grid(8, 8).map_err(|e| ConfigError::new(0, e.to_string()))?, 2).map_err(geo)?,
        Some(other) => return Err(ConfigError::new(0, format!("unknown built-in embedding {:?} (path-row, subdivision)", other))),
        None => {
            let need = |o: &Option<String>, flag: &str| o.clone().ok_or_else(|| ConfigError::new(0, format!("{} is required without --builtin", flag)));
            let source = build(&need(&a.source, "--source")?)?;
            let target = build(&need(&a.target, "--target")?)?;
            QiEmbedding::parse(source, target, &read(&need(&a.map, "--map")?)?).map_err(geo)?
        }
    };
    let report = verify_qi_embedding(&emb, a.pairs, a.seed);
    let mut out = format!("embedding C={} source={} target={}\n{}\n", emb.c, emb.source.n(), emb.target.n(), report);
    let mut outcome = if report.passed() { Outcome::Pass } else { Outcome::Invariant };
    if a.simulate > 0 {
        let k = TransferConstants::new(emb.c, 1, 1, 1);
        let mut w = Wanderer::away_and_back(&emb, 2, 12, 1, 1, a.seed);
        let t = simulate_transfer(&emb, &k, &mut w, a.simulate);
        let _ = writeln!(out, "constants s_U={} rho_U={} s_G={} rho_G={}", k.s_u, k.rho_u, k.s_g, k.rho_g);
        let _ = writeln!(out, "transfer {}", t);
        if !t.passed() {
            outcome = Outcome::Invariant;
        }
    }
    Ok((out, outcome))
}

pub fn verify_hyperbolicity(graph: &str, budget: usize, expect: Option<usize>) -> CommandResult {
    let g = build(graph)?;
    let d = delta_hyperbolicity_slim(&g, budget);
    let mut out = format!("graph {} vertices={}\n", graph, g.n());
    if !d.exact {
        let _ = writeln!(out, "delta in [{}, {}] ({} vertex pairs had more than {} geodesics)", d.lower, d.upper, d.truncated_pairs, budget);
        return Ok((out, Outcome::Inconclusive));
    }
    let _ = writeln!(out, "delta {}", d.lower);
    if let Some(w) = &d.witness {
        let _ = writeln!(out, "witness sides {:?} {:?} {:?} rechecked={:?}", w.sides[0], w.sides[1], w.sides[2], w.recheck(&g));
    }
    let ok = expect.is_none_or(|e| e == d.lower) && d.witness.as_ref().is_none_or(|w| w.recheck(&g) == Some(d.lower));
    Ok((out, if ok { Outcome::Pass } else { Outcome::Invariant }))
}

pub fn verify_treedecomp(graph: &str, decomp: Option<&str>, write_to: Option<&str>) -> CommandResult {
    let g = build(graph)?;
    match decomp {
        Some(p) => {
            let d = TreeDecomposition::parse(&read(p)?).map_err(|e| ConfigError::new(0, e.to_string()))?;
            match d.validate(&g) {
                Ok(()) => Ok((format!("valid tree decomposition of width {} with {} bags\n", d.width(), d.bags.len()), Outcome::Pass)),
                Err(e) => Ok((format!("invalid tree decomposition: {}\n", e), Outcome::Invariant)),
            }
        }
        None => match treewidth_exact(&g) {
            Ok((tw, d)) => {
                if let Some(p) = write_to {
                    write(p, &d.to_text())?;
                }
                let valid = d.validate(&g).is_ok() && d.width() == tw;
                Ok((format!("treewidth {} (decomposition with {} bags, valid={})\n", tw, d.bags.len(), valid), if valid { Outcome::Pass } else { Outcome::Invariant }))
            }
            Err(e @ SolverError::TooLarge { .. }) => Ok((format!("{}\n", e), Outcome::Inconclusive)),
            Err(e) => Err(ConfigError::new(0, e.to_string())),
        },
    }
}

pub fn verify_haven(graph: &str, order: usize) -> CommandResult {
    let g = build(graph)?;
    let found = match haven_of_order(&g, order) {
        Ok(h) => h,
        Err(e) => return Ok((format!("{}\n", e), Outcome::Inconclusive)),
    };
    let mut out = String::new();
    let mut outcome = Outcome::Pass;
    match &found {
        Some(h) => match h.verify(&g, 1_000_000) {
            Ok(n) => {
                let _ = writeln!(out, "haven of order {}: found, verified on {} subsets", order, n);
            }
            Err(e) if e.starts_with("too many") => {
                let _ = writeln!(out, "haven of order {}: found, not verified ({})", order, e);
                outcome = Outcome::Inconclusive;
            }
            Err(e) => {
                let _ = writeln!(out, "haven of order {}: found but invalid: {}", order, e);
                outcome = Outcome::Invariant;
            }
        },
        None => {
            let _ = writeln!(out, "haven of order {}: none", order);
        }
    }
    if let Ok((tw, _)) = treewidth_exact(&g) {
        let consistent = found.is_some() == (order <= tw + 1);
        let _ = writeln!(out, "treewidth {}: duality {}", tw, if consistent { "holds" } else { "VIOLATED" });
        if !consistent {
            outcome = Outcome::Invariant;
        }
    }
    Ok((out, outcome))
}

pub fn replay_trace(trace_path: &str, graph: Option<&str>) -> CommandResult {
    let text = read(trace_path)?;
    let spec = match graph {
        Some(s) => s.to_string(),
        None => text
            .lines()
            .find_map(|l| l.strip_prefix("# graph "))
            .map(str::to_string)
            .ok_or_else(|| ConfigError::new(0, "trace names no graph; pass --graph"))?,
    };
    let g = build(&spec)?;
    let trace = Trace::parse(&text).map_err(|e| ConfigError::new(e.line, e.msg))?;
    match replay(&g, &trace) {
        Ok(statuses) => {
            let last = statuses.last().map(|s| s.to_string()).unwrap_or_default();
            Ok((format!("replayed {} records, final status {}, recorded verdict {}\n", statuses.len(), last, trace.verdict), Outcome::Pass))
        }
        Err(e @ ReplayError::Incomplete) => Ok((format!("nothing to replay: {}\n", e), Outcome::ConfigFault)),
        Err(e) => Ok((format!("replay failed: {}\n", e), Outcome::Invariant)),
    }
}

/// Runs one named suite, or all of them for `all`.
pub fn suite(name: &str) -> CommandResult {
    let names: Vec<&str> = if name == "all" { SUITES.to_vec() } else { vec![name] };
    let mut out = String::new();
    let mut outcome = Outcome::Pass;
    for n in names {
        let r = run_suite(n).ok_or_else(|| ConfigError::new(0, format!("unknown suite {:?} (known: {}, all)", n, SUITES.join(", "))))?;
        out.push_str(&r.to_string());
        if !r.passed {
            outcome = outcome.worst(Outcome::Invariant);
        }
    }
    Ok((out, outcome))
}
