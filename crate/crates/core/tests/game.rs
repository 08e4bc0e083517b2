use std::rc::Rc;

use pursuit::game::{replay, run_match, GameParams, MatchOptions, MatchResult, Objective, Order, ReplayError, Status, Trace, Verdict};
use pursuit::geometry::{build_fat_minor_grid, Pattern};
use pursuit::graph::families::{cycle, grid_window, random_tree, series_parallel};
use pursuit::graph::{Graph, TreeDecomposition};
use pursuit::solver::{best_response, haven_of_order, treewidth_exact, DEFAULT_BUDGET};
use pursuit::strategies::{CycleRobber, GridRobber, HavenRobber, ScriptKind, ScriptedCops, TdCops};

fn cycle_match(n: usize, kind: ScriptKind, record: bool) -> (Graph, MatchResult) {
    let g = cycle(n).unwrap();
    let mut cops = ScriptedCops::new(kind, 1, 1, 1);
    let mut robber = CycleRobber::new((0..n).collect());
    let res = run_match(&g, Order::Weak, &mut cops, &mut robber, &MatchOptions { horizon: 2000, record, ..Default::default() });
    (g, res)
}

fn failure_tallies(res: &MatchResult) -> u64 {
    res.robber_counters.iter().filter(|(k, _)| k.ends_with("_failures") || *k == "post_relocation_unsafe").map(|(_, v)| *v).sum()
}

#[test]
fn trace_text_round_trip_replays() {
    let (g, res) = cycle_match(400, ScriptKind::Greedy, true);
    assert!(matches!(res.verdict, Verdict::CertifiedRobberWin { .. }), "{}", res.verdict);
    let text = res.trace.to_text();
    let back = Trace::parse(&text).expect("parse");
    let mut expect = res.trace.records.clone();
    for r in &mut expect {
        for n in &mut r.notes {
            *n = n.replace(' ', "_");
        }
    }
    assert_eq!(back.records, expect);
    assert_eq!(back.params, res.trace.params);
    assert_eq!(back.declarations, res.trace.declarations);
    assert_eq!(back.to_text(), text);
    let statuses = replay(&g, &back).expect("replay");
    assert_eq!(statuses.len(), back.records.len());
    assert_eq!(statuses.last(), back.records.last().map(|r| &r.status));
}

#[test]
fn illegal_recorded_move_is_rejected() {
    let (g, res) = cycle_match(400, ScriptKind::Greedy, true);
    let mut t = res.trace.clone();
    let i = t.records.iter().position(|r| r.path.len() > 2).expect("a relocation");
    let start = t.records[i].path[0];
    t.records[i].path = vec![start, (start + 200) % 400];
    assert!(matches!(replay(&g, &t), Err(ReplayError::Illegal { index, .. }) if index == i));

    let mut t = res.trace.clone();
    t.records[3].status = Status::Captured;
    assert!(matches!(replay(&g, &t), Err(ReplayError::StatusMismatch { index: 3, .. })));

    let mut t = res.trace;
    t.params = None;
    assert_eq!(replay(&g, &t), Err(ReplayError::Incomplete));
}

#[test]
fn matches_are_deterministic() {
    let a = cycle_match(400, ScriptKind::Random(9), true).1;
    let b = cycle_match(400, ScriptKind::Random(9), true).1;
    assert_eq!(a.trace.to_text(), b.trace.to_text());
    assert_eq!(a.verdict, b.verdict);
}

#[test]
fn cycle_robber_keeps_distance() {
    for kind in [ScriptKind::Greedy, ScriptKind::RandomStream(4), ScriptKind::Stationary] {
        let (_, res) = cycle_match(400, kind, false);
        assert!(!matches!(res.verdict, Verdict::Captured { .. } | Verdict::InvariantFailure { .. }), "{}", res.verdict);
        assert_eq!(failure_tallies(&res), 0);
        if let Some(&d) = res.robber_counters.get("min_post_distance") {
            assert!(d >= 11);
        }
    }
}

#[test]
fn grid_robber_survives_one_cop() {
    let w = GridRobber::window_for(1, 1, 1, (0, 0), 8);
    let g = grid_window(w.xmin, w.xmax, w.ymin, w.ymax).unwrap();
    for kind in [ScriptKind::Greedy, ScriptKind::Random(2), ScriptKind::Stationary] {
        let mut cops = ScriptedCops::new(kind, 1, 1, 1);
        let mut robber = GridRobber::new(1, (0, 0));
        let res = run_match(&g, Order::Weak, &mut cops, &mut robber, &MatchOptions { horizon: 3000, record: false, ..Default::default() });
        assert!(matches!(res.verdict, Verdict::CertifiedRobberWin { .. } | Verdict::HorizonExhausted { .. }), "{}", res.verdict);
        assert_eq!(failure_tallies(&res), 0, "{:?}", res.robber_counters);
    }
}

#[test]
fn haven_robber_survives_two_cops_on_fat_k4() {
    let model = Rc::new(build_fat_minor_grid(Pattern::Complete(4), 6, 2).unwrap());
    let haven = haven_of_order(&model.pattern, 4).unwrap().expect("K4 haven");
    let g = model.host.clone();
    for kind in [ScriptKind::Greedy, ScriptKind::Stationary] {
        let mut cops = ScriptedCops::new(kind, 2, 1, 1);
        let mut robber = HavenRobber::new(Rc::clone(&model), haven.clone());
        let res = run_match(&g, Order::Weak, &mut cops, &mut robber, &MatchOptions { horizon: 2000, record: false, ..Default::default() });
        assert!(matches!(res.verdict, Verdict::CertifiedRobberWin { .. } | Verdict::HorizonExhausted { .. }), "{}", res.verdict);
        assert_eq!(failure_tallies(&res), 0, "{:?}", res.robber_counters);
    }
}

#[test]
fn td_cops_never_lose_on_trees() {
    for seed in 0..6u64 {
        let g = random_tree(9, seed).unwrap();
        let (_, decomp) = treewidth_exact(&g).unwrap();
        let params = GameParams {
            cops: decomp.width() + 1,
            cop_speed: 1,
            robber_speed: g.n(),
            reach: 1,
            objective: Objective::ProtectBall { center: 0, radius: 1 },
            order: Order::Weak,
        };
        let cops = TdCops::new(decomp);
        let mut robber = best_response(&g, &params, &cops, DEFAULT_BUDGET).unwrap();
        let mut c = cops.clone();
        let res = run_match(&g, Order::Weak, &mut c, &mut robber, &MatchOptions { horizon: 500, record: false, ..Default::default() });
        assert!(
            matches!(res.verdict, Verdict::Captured { .. } | Verdict::CopObjectiveMet { .. }),
            "seed {}: {}",
            seed,
            res.verdict
        );
    }
}

#[test]
fn decomposition_text_round_trip() {
    for seed in 0..5u64 {
        let (g, d) = series_parallel(seed, 15).unwrap();
        let back = TreeDecomposition::parse(&d.to_text()).unwrap();
        assert_eq!(back.bags, d.bags);
        assert_eq!(back.edges, d.edges);
        back.validate(&g).unwrap();
    }
    assert!(TreeDecomposition::parse("bag x: 1 2").is_err());
}
