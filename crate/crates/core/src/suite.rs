//! Built-in experiment suites, one per acceptance criterion.
//!
//! Every suite is deterministic: the report lines depend only on the code, never on
//! timing, so two runs print identical reports. Wall time is kept apart in `elapsed`.

use std::collections::HashSet;
use std::fmt;
use std::rc::Rc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::{run_match, GameParams, MatchOptions, MatchResult, Objective, Order, Phase, Verdict};
use crate::geometry::{build_fat_minor_grid, simulate_transfer, verify_fat_minor, verify_qi_embedding, Pattern, QiEmbedding, TransferConstants, Wanderer};
use crate::graph::families::{connected_graphs, cycle, grid_window, hub_graph, random_connected, random_tree, series_parallel, square_grid};
use crate::graph::{Graph, Vertex};
use crate::solver::{
    arena_size, best_response, build_arena, copwin, delta_hyperbolicity_slim, geodesic_triangles, haven_of_order, minimax_winners,
    replay_strategies, solve_buchi, target_states, treewidth_exact, GameGraph, SolverError, DEFAULT_BUDGET,
};
use crate::strategies::{hub_branch_degree, CycleRobber, GridRobber, HavenRobber, HubRobber, RoomLayout, ScriptKind, ScriptedCops, TargetFn, TdCops};

/// Stage bound shared by the evasion suites.
pub const STAGE_LIMIT: usize = 10_000;

/// Names of the built-in suites in criterion order.
pub const SUITES: [&str; 9] = ["grid", "cycle", "haven", "td", "hub", "solver", "duality", "hyperbolicity", "qi"];

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub lines: Vec<String>,
    pub elapsed: Duration,
}

impl SuiteReport {
    fn new(id: usize) -> Self {
        SuiteReport { id, name: SUITES[id - 1], passed: true, lines: Vec::new(), elapsed: Duration::ZERO }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        self.lines.push(format!("{} {}", if ok { "ok  " } else { "FAIL" }, line));
    }

    fn note(&mut self, line: String) {
        self.lines.push(format!("     {}", line));
    }

    /// One-line verdict.
    pub fn headline(&self) -> String {
        format!("criterion {} {}: {}", self.id, self.name, if self.passed { "PASS" } else { "FAIL" })
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.headline())?;
        for l in &self.lines {
            writeln!(f, "  {}", l)?;
        }
        Ok(())
    }
}

/// Runs a suite by name or criterion number.
pub fn run_suite(name: &str) -> Option<SuiteReport> {
    let id = SUITES.iter().position(|&s| s == name).map(|i| i + 1).or_else(|| name.parse().ok().filter(|i| (1..=9).contains(i)))?;
    let t0 = Instant::now();
    let mut r = match id {
        1 => grid_suite(),
        2 => cycle_suite(),
        3 => haven_suite(),
        4 => td_suite(),
        5 => hub_suite(),
        6 => solver_suite(),
        7 => duality_suite(),
        8 => hyperbolicity_suite(),
        _ => qi_suite(),
    };
    r.elapsed = t0.elapsed();
    Some(r)
}

/// Greedy, intercept, three positional random seeds and stationary cops.
fn scripted_kinds(intercept: TargetFn) -> Vec<ScriptKind> {
    vec![ScriptKind::Greedy, ScriptKind::Intercept(intercept), ScriptKind::Random(1), ScriptKind::Random(2), ScriptKind::Random(3), ScriptKind::Stationary]
}

fn no_targets() -> TargetFn {
    Rc::new(|_: &Graph, _| Vec::new())
}

fn play(g: &Graph, order: Order, cops: &mut ScriptedCops, robber: &mut dyn crate::game::RobberAgent, record: bool) -> MatchResult {
    let opts = MatchOptions { horizon: STAGE_LIMIT, certify: true, record, dist_cap: Some(0) };
    run_match(g, order, cops, robber, &opts)
}

fn certified_within(res: &MatchResult) -> bool {
    matches!(res.verdict, Verdict::CertifiedRobberWin { .. }) && res.stages <= STAGE_LIMIT
}

fn counter(res: &MatchResult, key: &str) -> usize {
    res.robber_counters.get(key).copied().unwrap_or(0) as usize
}

fn captured(res: &MatchResult) -> bool {
    matches!(res.verdict, Verdict::Captured { .. })
}

fn grid_suite() -> SuiteReport {
    let mut r = SuiteReport::new(1);
    let t0 = Instant::now();
    for t in 1..=2usize {
        for s in 1..=2usize {
            for rho in 1..=2usize {
                let margin = (2 * (3 * rho + 1) * s) as i64;
                let w = GridRobber::window_for(t, s, rho, (0, 0), margin);
                let g = grid_window(w.xmin, w.xmax, w.ymin, w.ymax).expect("grid window");
                let layout = RoomLayout::new(t, s, rho, (0, 0));
                let exits = layout.clone();
                let intercept: TargetFn = Rc::new(move |g: &Graph, v| {
                    let w = g.grid().expect("grid window");
                    let (x, y) = w.decode(v);
                    exits.room_of(x, y).map(|room| exits.exits(room).into_iter().filter_map(|(a, b)| w.encode(a, b)).collect()).unwrap_or_default()
                });
                for kind in scripted_kinds(intercept) {
                    let mut cops = ScriptedCops::new(kind, t, s, rho);
                    let mut robber = GridRobber::new(t, (0, 0));
                    let res = play(&g, Order::Weak, &mut cops, &mut robber, true);
                    let outside = res
                        .trace
                        .robber_vertices()
                        .into_iter()
                        .filter(|&v| {
                            let (x, y) = w.decode(v);
                            !layout.in_box(x, y)
                        })
                        .count();
                    let super_safe = counter(&res, "super_safe_failures");
                    let ok = certified_within(&res) && !captured(&res) && outside == 0 && super_safe == 0;
                    r.check(
                        ok,
                        format!(
                            "t={} s_c={} rho={} cops={}: {} stages={} relocations={} outside_box={} super_safe_failures={}",
                            t,
                            s,
                            rho,
                            crate::game::CopAgent::name(&cops),
                            res.verdict,
                            res.stages,
                            counter(&res, "relocations"),
                            outside,
                            super_safe
                        ),
                    );
                }
            }
        }
    }
    let secs = t0.elapsed().as_secs();
    r.passed &= secs < 300;
    if secs >= 300 {
        r.lines.push(format!("FAIL runtime {} s exceeds 300 s", secs));
    }
    r
}

fn cycle_suite() -> SuiteReport {
    let mut r = SuiteReport::new(2);
    for s in 1..=2usize {
        for rho in 1..=2usize {
            let n = 400 * rho * s;
            let g = cycle(n).expect("cycle");
            let need = 10 * rho * s + s;
            for kind in scripted_kinds(no_targets()) {
                let mut cops = ScriptedCops::new(kind, 1, s, rho);
                let mut robber = CycleRobber::new((0..n).collect());
                let res = play(&g, Order::Weak, &mut cops, &mut robber, false);
                let post = robber.post_distances();
                let unsafe_posts = post.iter().filter(|&&d| d < need).count();
                let ok = certified_within(&res) && unsafe_posts == 0 && counter(&res, "post_relocation_unsafe") == 0;
                r.check(
                    ok,
                    format!(
                        "n={} s_c={} rho={} cops={}: {} stages={} relocations={} min_post_distance={} below_{}={}",
                        n,
                        s,
                        rho,
                        crate::game::CopAgent::name(&cops),
                        res.verdict,
                        res.stages,
                        post.len(),
                        post.iter().min().map_or("-".into(), |d| d.to_string()),
                        need,
                        unsafe_posts
                    ),
                );
            }
        }
    }
    r
}

fn haven_suite() -> SuiteReport {
    let mut r = SuiteReport::new(3);
    for (sc, rho) in [(1usize, 1usize), (1, 2), (2, 1), (2, 2)] {
        let d = 2 * (sc + rho + 1);
        let model = match build_fat_minor_grid(Pattern::Complete(4), d, 2) {
            Ok(m) => Rc::new(m),
            Err(e) => {
                r.check(false, format!("s_c={} rho={}: model construction failed: {}", sc, rho, e));
                continue;
            }
        };
        let report = verify_fat_minor(&model);
        r.check(report.passed(), format!("s_c={} rho={}: K4 model D={} host={} vertices verified={}", sc, rho, d, model.host.n(), report.passed()));
        let haven = match haven_of_order(&model.pattern, 4) {
            Ok(Some(h)) => h,
            other => {
                r.check(false, format!("no haven of order 4 on K4: {:?}", other.err()));
                continue;
            }
        };
        let centers: Vec<Vertex> = model.branches.iter().map(|b| b[b.len() / 2]).collect();
        let intercept: TargetFn = Rc::new(move |_: &Graph, _| centers.clone());
        for kind in scripted_kinds(intercept) {
            let mut cops = ScriptedCops::new(kind, 2, sc, rho);
            let mut robber = HavenRobber::new(Rc::clone(&model), haven.clone());
            let res = play(&model.host, Order::Weak, &mut cops, &mut robber, false);
            let fails: usize = ["unique_branch_failures", "dist_failures", "bramble_failures"].iter().map(|k| counter(&res, k)).sum();
            r.check(
                certified_within(&res) && fails == 0,
                format!(
                    "s_c={} rho={} cops={}: {} stages={} unique_branch={}/{} dist={}/{} bramble={}/{} route_failures={}",
                    sc,
                    rho,
                    crate::game::CopAgent::name(&cops),
                    res.verdict,
                    res.stages,
                    counter(&res, "unique_branch_failures"),
                    counter(&res, "unique_branch_checks"),
                    counter(&res, "dist_failures"),
                    counter(&res, "dist_checks"),
                    counter(&res, "bramble_failures"),
                    counter(&res, "bramble_checks"),
                    counter(&res, "route_failures")
                ),
            );
        }
    }
    r
}

/// Vertex count of the `i`-th series-parallel instance of the cop-side suite.
pub fn td_instance_size(i: usize) -> usize {
    if i < 6 {
        7 + i
    } else {
        20 + (i - 6) * 80 / 13
    }
}

fn td_suite() -> SuiteReport {
    let mut r = SuiteReport::new(4);
    for i in 0..20usize {
        let (g, decomp) = series_parallel(1000 + i as u64, td_instance_size(i)).expect("series-parallel instance");
        let mut rng = ChaCha8Rng::seed_from_u64(2000 + i as u64);
        let center = rng.gen_range(0..g.n());
        let params = GameParams {
            cops: 3,
            cop_speed: 1,
            robber_speed: g.n(),
            reach: 1,
            objective: Objective::ProtectBall { center, radius: 2 },
            order: Order::Weak,
        };
        let cops = TdCops::new(decomp);
        let mut robber = match best_response(&g, &params, &cops, DEFAULT_BUDGET) {
            Ok(b) => b,
            Err(e) => {
                r.check(false, format!("instance {} n={}: best response failed: {}", i, g.n(), e));
                continue;
            }
        };
        let mut c = cops.clone();
        let res = run_match(&g, Order::Weak, &mut c, &mut robber, &MatchOptions { horizon: STAGE_LIMIT, certify: true, record: false, dist_cap: Some(0) });
        let small = arena_size(g.n(), 3).is_some_and(|s| s <= 10_000);
        let cw = if small { Some(copwin(&g, &params, DEFAULT_BUDGET)) } else { None };
        let cw_ok = match &cw {
            None => true,
            Some(Ok(b)) => *b,
            Some(Err(_)) => false,
        };
        let met = matches!(res.verdict, Verdict::CopObjectiveMet { .. });
        r.check(
            met && cw_ok,
            format!(
                "instance {} n={} center={} robber_can_win={:?}: {} copwin={}",
                i,
                g.n(),
                center,
                robber.start_wins(),
                res.verdict,
                match cw {
                    None => "skipped".to_string(),
                    Some(Ok(b)) => b.to_string(),
                    Some(Err(e)) => e.to_string(),
                }
            ),
        );
    }
    r
}

fn hub_suite() -> SuiteReport {
    let mut r = SuiteReport::new(5);
    for k in 1..=2usize {
        let c = hub_branch_degree(k, 1, 1);
        let hub = hub_graph(c, 3).expect("hub graph");
        let branch = hub.branch(c).expect("branch");
        let mut inside: HashSet<Vertex> = branch.nodes.iter().copied().collect();
        for p in branch.up_paths.iter().chain(&branch.hub_paths) {
            inside.extend(p.iter().copied());
        }
        inside.remove(&hub.hub);
        for kind in scripted_kinds(no_targets()) {
            let mut cops = ScriptedCops::new(kind, k, 1, 1);
            let mut robber = match HubRobber::new(&hub, c) {
                Ok(h) => h,
                Err(e) => {
                    r.check(false, format!("k={}: {}", k, e));
                    continue;
                }
            };
            let res = play(&hub.graph, Order::Strong, &mut cops, &mut robber, true);
            let escaped = res.trace.robber_vertices().into_iter().filter(|v| !inside.contains(v) || hub.graph.is_boundary(*v)).count();
            r.check(
                certified_within(&res) && escaped == 0,
                format!(
                    "k={} C={} cops={}: {} stages={} outside_window={}",
                    k,
                    c,
                    crate::game::CopAgent::name(&cops),
                    res.verdict,
                    res.stages,
                    escaped
                ),
            );
        }
    }
    r
}

/// Random game on a small random graph whose arena has at most `max_states` states.
pub fn random_arena_instance(seed: u64, max_states: usize) -> (Graph, GameParams) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.gen_range(3..=12);
        let p = rng.gen_range(0.1..0.6);
        let g = random_connected(n, p, rng.gen()).expect("random connected graph");
        let cops = rng.gen_range(1..=2);
        let Some(states) = arena_size(n, cops) else { continue };
        if states > max_states {
            continue;
        }
        let objective = match rng.gen_range(0..3) {
            0 => Objective::ProtectBall { center: rng.gen_range(0..n), radius: rng.gen_range(1..=2) },
            1 => Objective::Divergence { center: rng.gen_range(0..n) },
            _ => {
                let mut set: Vec<Vertex> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
                if set.is_empty() {
                    set.push(rng.gen_range(0..n));
                }
                Objective::ProtectFinite(set)
            }
        };
        let params = GameParams {
            cops,
            cop_speed: rng.gen_range(1..=2),
            robber_speed: rng.gen_range(1..=3),
            reach: rng.gen_range(0..=1),
            objective,
            order: if rng.gen_bool(0.5) { Order::Weak } else { Order::Strong },
        };
        return (g, params);
    }
}

fn solver_suite() -> SuiteReport {
    let mut r = SuiteReport::new(6);
    let mut total_states = 0usize;
    let mut disagreements = 0usize;
    let mut replays = 0usize;
    let mut replay_failures = 0usize;
    for i in 0..200u64 {
        let (g, params) = random_arena_instance(6000 + i, 2000);
        let arena = match build_arena(&g, &params, 2000) {
            Ok(a) => Rc::new(a),
            Err(e) => {
                r.check(false, format!("arena {}: {}", i, e));
                continue;
            }
        };
        let visit = target_states(arena.as_ref());
        let sets = Rc::new(solve_buchi(arena.as_ref(), &visit));
        let oracle = minimax_winners(arena.as_ref(), &visit);
        let bad = (0..arena.num_states()).filter(|&s| oracle[s] != sets.winner[s]).count();
        total_states += arena.num_states();
        disagreements += bad;
        let mut rng = ChaCha8Rng::seed_from_u64(7000 + i);
        let starts: Vec<usize> = (0..arena.num_states()).filter(|&s| arena.cops_to_move(s) && !arena.is_capture(s)).collect();
        let mut failed_here = Vec::new();
        for _ in 0..starts.len().min(3) {
            let s = starts[rng.gen_range(0..starts.len())];
            let st = arena.state(s);
            debug_assert_eq!(st.phase, Phase::CopsToMove);
            let out = replay_strategies(&g, &arena, &sets, &st.cops, st.robber, 3);
            replays += 1;
            if !out.achieved {
                replay_failures += 1;
                failed_here.push(format!("start cops={:?} robber={} {:?}: {} ({})", st.cops, st.robber, out.winner, out.verdict, out.detail));
            }
        }
        if bad > 0 || !failed_here.is_empty() {
            r.check(false, format!("arena {} n={} params={:?}: {} disagreements, replay failures {:?}", i, g.n(), params, bad, failed_here));
        }
    }
    r.check(disagreements == 0, format!("200 arenas, {} states, {} Buchi/minimax disagreements", total_states, disagreements));
    r.check(replay_failures == 0, format!("{} strategy replays over 3 periods, {} failures", replays, replay_failures));
    r
}

fn duality_line(g: &Graph, label: &str) -> Result<(bool, String), SolverError> {
    let (tw, _) = treewidth_exact(g)?;
    let mut wrong = Vec::new();
    for k in 1..=g.n() + 1 {
        let exists = haven_of_order(g, k)?.is_some();
        if exists != (k <= tw + 1) {
            wrong.push(k);
        }
    }
    Ok((wrong.is_empty(), format!("{} n={} m={} tw={} mismatched orders {:?}", label, g.n(), g.edge_count(), tw, wrong)))
}

fn duality_suite() -> SuiteReport {
    let mut r = SuiteReport::new(7);
    let mut graphs: Vec<(String, Graph)> = Vec::new();
    for n in 1..=6 {
        let all = connected_graphs(n).expect("enumeration");
        r.note(format!("{} connected graphs on {} vertices", all.len(), n));
        graphs.extend(all.into_iter().enumerate().map(|(i, g)| (format!("n{}#{}", n, i), g)));
    }
    for i in 0..30u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(8000 + i);
        let p = rng.gen_range(0.1..0.8);
        graphs.push((format!("random7#{}", i), random_connected(7, p, 9000 + i).expect("random graph")));
    }
    let mut failures = 0;
    for (label, g) in &graphs {
        match duality_line(g, label) {
            Ok((true, _)) => {}
            Ok((false, line)) => {
                failures += 1;
                r.check(false, line);
            }
            Err(e) => {
                failures += 1;
                r.check(false, format!("{}: {}", label, e));
            }
        }
    }
    r.check(failures == 0, format!("{} graphs checked, {} with a haven/treewidth mismatch", graphs.len(), failures));
    r
}

fn hyperbolicity_suite() -> SuiteReport {
    let mut r = SuiteReport::new(8);
    let mut triangles = 0usize;
    let mut bad_triangles = 0usize;
    let mut nonzero = 0usize;
    for i in 0..50u64 {
        let n = 2 + (i as usize * 58) / 49;
        let t = random_tree(n, 500 + i).expect("random tree");
        let d = delta_hyperbolicity_slim(&t, 4);
        if !(d.exact && d.value() == Some(0)) {
            nonzero += 1;
            r.check(false, format!("tree {} n={}: delta bracket [{}, {}] exact={}", i, n, d.lower, d.upper, d.exact));
        }
        match geodesic_triangles(&t, 4) {
            Some(tris) => {
                triangles += tris.len();
                bad_triangles += tris.iter().filter(|x| x.recheck(&t) != Some(x.slimness)).count();
            }
            None => {
                bad_triangles += 1;
                r.check(false, format!("tree {}: triangle enumeration exceeded the geodesic budget", i));
            }
        }
    }
    r.check(nonzero == 0, format!("50 random trees (2..=60 vertices): {} with nonzero or inexact delta", nonzero));
    let c12 = cycle(12).expect("cycle");
    let d = delta_hyperbolicity_slim(&c12, 16);
    match geodesic_triangles(&c12, 16) {
        Some(tris) => {
            let brute = tris.iter().map(|t| t.slimness).max();
            triangles += tris.len();
            bad_triangles += tris.iter().filter(|x| x.recheck(&c12) != Some(x.slimness)).count();
            let witness_ok = d.witness.as_ref().is_some_and(|w| w.recheck(&c12) == brute);
            r.check(d.exact && d.value() == brute && witness_ok, format!("C12: delta={:?} brute force={:?} witness rechecks={}", d.value(), brute, witness_ok));
        }
        None => r.check(false, "C12: triangle enumeration exceeded the geodesic budget".into()),
    }
    r.check(bad_triangles == 0, format!("{} geodesic triangles re-validated, {} mismatches", triangles, bad_triangles));
    r
}

fn qi_suite() -> SuiteReport {
    let mut r = SuiteReport::new(9);
    let mut symbolic = 0;
    let mut mismatched = 0;
    for c in 1..=4usize {
        for s in 1..=3usize {
            for rho in 0..=3usize {
                let k = TransferConstants::new(c, s, rho, 1);
                symbolic += 1;
                if k.s_u != 500 * c * c * c * s || k.rho_u != 2 * rho + c + 16 * c * c * c * (rho + c) {
                    mismatched += 1;
                }
            }
        }
    }
    r.check(mismatched == 0, format!("shadow constants checked against s_U=500C^3s and rho_U=2rho+C+16C^3(rho+C) on {} tuples, {} mismatches", symbolic, mismatched));
    let k1 = TransferConstants::new(1, 1, 1, 1);
    r.check(k1.s_u == 500 && k1.rho_u == 35, format!("C=1 s=1 rho=1: s_U={} rho_U={}", k1.s_u, k1.rho_u));
    let cases = vec![
        ("path row into grid", QiEmbedding::path_row(120, 20, 120)),
        ("2-subdivision of the 8x8 grid", square_grid(8, 8).map_err(Into::into).and_then(|g| QiEmbedding::subdivision(g, 2))),
    ];
    for (label, emb) in cases {
        let emb = match emb {
            Ok(e) => e,
            Err(e) => {
                r.check(false, format!("{}: {}", label, e));
                continue;
            }
        };
        let qi = verify_qi_embedding(&emb, 100_000, 1);
        r.check(qi.passed(), format!("{} C={}: embedding inequalities over {} pairs, {} violations", label, emb.c, qi.pairs, qi.violations.len()));
        let k = TransferConstants::new(emb.c, 1, 1, 1);
        let mut wanderer = Wanderer::away_and_back(&emb, 2, 12, 1, 1, 7);
        let rep = simulate_transfer(&emb, &k, &mut wanderer, STAGE_LIMIT);
        let first = rep.failures.first().cloned().unwrap_or_default();
        r.check(rep.passed() && rep.stages == STAGE_LIMIT, format!("{} C={}: {}{}", label, emb.c, summary_line(&rep.to_string()), if first.is_empty() { String::new() } else { format!(" first failure: {}", first) }));
    }
    r
}

fn summary_line(s: &str) -> String {
    s.lines().next().unwrap_or_default().to_string()
}
