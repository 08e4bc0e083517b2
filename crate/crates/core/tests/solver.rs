use std::rc::Rc;

use pursuit::game::{GameParams, Objective, Order, Phase};
use pursuit::graph::families::{complete, cycle, path, random_connected, random_tree, square_grid};
use pursuit::graph::Graph;
use pursuit::solver::*;

fn params(k: usize, sc: usize, sr: usize, reach: usize, objective: Objective) -> GameParams {
    GameParams { cops: k, cop_speed: sc, robber_speed: sr, reach, objective, order: Order::Weak }
}

fn ball(center: usize, radius: usize) -> Objective {
    Objective::ProtectBall { center, radius }
}

#[test]
fn path3_state_count() {
    let g = path(3).unwrap();
    let a = build_arena(&g, &params(1, 1, 1, 0, ball(1, 1)), DEFAULT_BUDGET).unwrap();
    assert_eq!(a.num_states(), 18);
    assert_eq!((0..18).filter(|&s| a.is_capture(s)).count(), 6);
}

#[test]
fn cop_pairs_are_multisets() {
    let g = cycle(4).unwrap();
    let a = build_arena(&g, &params(2, 1, 1, 0, ball(0, 1)), DEFAULT_BUDGET).unwrap();
    assert_eq!(a.cop_sets().len(), 10);
}

#[test]
fn budget_is_enforced() {
    let g = cycle(30).unwrap();
    let err = build_arena(&g, &params(3, 1, 1, 0, ball(0, 1)), 1000).unwrap_err();
    assert!(matches!(err, SolverError::Budget { .. }));
}

#[test]
fn double_speed_edges_are_two_step_closure() {
    let g = random_connected(9, 0.3, 4).unwrap();
    let one = build_arena(&g, &params(1, 1, 1, 0, ball(0, 1)), DEFAULT_BUDGET).unwrap();
    let two = build_arena(&g, &params(1, 1, 2, 0, ball(0, 1)), DEFAULT_BUDGET).unwrap();
    for s in (1..one.num_states()).step_by(2) {
        if one.is_capture(s) {
            continue;
        }
        let st = one.state(s);
        let mut closure = std::collections::BTreeSet::new();
        for t in one.successors(s) {
            let mid = one.state(t).robber;
            closure.insert(mid);
            let back = one.id(&st.cops, mid, Phase::RobberToMove).unwrap();
            for u in one.successors(back) {
                closure.insert(one.state(u).robber);
            }
        }
        let direct: std::collections::BTreeSet<_> = two.successors(s).into_iter().map(|t| two.state(t).robber).collect();
        assert_eq!(closure, direct, "state {:?}", st);
    }
}

#[test]
fn lone_robber_wins_everywhere() {
    let g = cycle(5).unwrap();
    let a = build_arena(&g, &params(0, 1, 1, 0, ball(0, 1)), DEFAULT_BUDGET).unwrap();
    let w = solve_buchi(&a, &target_states(&a));
    assert_eq!(w.count(Winner::Robber), a.num_states());
    assert!(!copwin(&g, &params(0, 1, 1, 0, ball(0, 1)), DEFAULT_BUDGET).unwrap());
}

#[test]
fn path20_cops_win() {
    let g = path(20).unwrap();
    let p = params(1, 1, 1, 0, ball(10, 2));
    let a = build_arena(&g, &p, DEFAULT_BUDGET).unwrap();
    let visit = target_states(&a);
    let w = solve_buchi(&a, &visit);
    assert_eq!(w.count(Winner::Robber), 0);
    assert_eq!(minimax_winners(&a, &visit), w.winner);
    assert!(copwin(&g, &p, DEFAULT_BUDGET).unwrap());
}

#[test]
fn four_cycle_evasion() {
    let g = cycle(4).unwrap();
    let p = params(1, 1, 1, 0, Objective::ProtectFinite(vec![0, 1, 2, 3]));
    let a = build_arena(&g, &p, DEFAULT_BUDGET).unwrap();
    let visit = target_states(&a);
    let w = solve_buchi(&a, &visit);
    assert_eq!(minimax_winners(&a, &visit), w.winner);
    let cops = a.id(&[0], 2, Phase::CopsToMove).unwrap();
    assert!(w.robber_wins(cops));
    assert!(!copwin(&g, &p, DEFAULT_BUDGET).unwrap());
    let reach1 = params(1, 1, 1, 1, Objective::ProtectFinite(vec![0, 1, 2, 3]));
    assert!(copwin(&g, &reach1, DEFAULT_BUDGET).unwrap());
    let a1 = build_arena(&g, &reach1, DEFAULT_BUDGET).unwrap();
    let v1 = target_states(&a1);
    assert_eq!(minimax_winners(&a1, &v1), solve_buchi(&a1, &v1).winner);
}

#[test]
fn single_vertex_region() {
    let g = path(5).unwrap();
    let lone = build_arena(&g, &params(0, 1, 1, 0, ball(4, 1)), DEFAULT_BUDGET).unwrap();
    let region: Vec<bool> = (0..lone.num_states()).map(|s| lone.state(s).robber == 4).collect();
    let w = solve_safety_within(&lone, &region);
    assert!(w.robber_wins(lone.id(&[], 4, Phase::CopsToMove).unwrap()));
    assert!(!w.robber_wins(lone.id(&[], 3, Phase::CopsToMove).unwrap()));
    let one = build_arena(&g, &params(1, 1, 1, 0, ball(4, 1)), DEFAULT_BUDGET).unwrap();
    let region: Vec<bool> = (0..one.num_states()).map(|s| one.state(s).robber == 4).collect();
    assert_eq!(solve_safety_within(&one, &region).count(Winner::Robber), 0);
}

#[test]
fn safety_matches_minimax_on_grid() {
    let g = square_grid(7, 7).unwrap();
    let a = build_arena(&g, &params(1, 1, 1, 0, Objective::Divergence { center: 24 }), DEFAULT_BUDGET).unwrap();
    let safe = solve_safety(&a);
    let everywhere: Vec<bool> = (0..a.num_states()).map(|s| a.cops_to_move(s) && !a.is_capture(s)).collect();
    assert_eq!(minimax_winners(&a, &everywhere), safe.winner);
}

#[test]
fn empty_visit_set_is_cop_win() {
    let g = cycle(6).unwrap();
    let a = build_arena(&g, &params(1, 1, 1, 0, ball(0, 1)), DEFAULT_BUDGET).unwrap();
    let w = solve_buchi(&a, &vec![false; a.num_states()]);
    assert_eq!(w.count(Winner::Robber), 0);
    let safe = solve_safety(&a);
    let all: Vec<bool> = (0..a.num_states()).map(|s| a.cops_to_move(s) && !a.is_capture(s)).collect();
    let everywhere = solve_buchi(&a, &all);
    assert_eq!(everywhere.winner, safe.winner);
}

#[test]
fn replayed_strategies_hold() {
    let g = cycle(6).unwrap();
    for reach in [0, 1] {
        let a = Rc::new(build_arena(&g, &params(1, 1, 1, reach, ball(0, 1)), DEFAULT_BUDGET).unwrap());
        let w = Rc::new(solve_buchi(a.as_ref(), &target_states(a.as_ref())));
        for r in 0..6 {
            let s = a.id(&[3], r, Phase::CopsToMove).unwrap();
            if a.is_capture(s) {
                continue;
            }
            let out = replay_strategies(&g, &a, &w, &[3], r, 3);
            assert!(out.achieved, "{:?}", out);
        }
    }
}

#[test]
fn winner_table_lists_every_state() {
    let g = path(3).unwrap();
    let a = build_arena(&g, &params(1, 1, 1, 0, ball(1, 1)), DEFAULT_BUDGET).unwrap();
    let w = solve_buchi(&a, &target_states(&a));
    assert_eq!(w.to_table(&a).lines().count(), 18);
}

#[test]
fn hyperbolicity_of_trees_is_zero() {
    for seed in 0..5 {
        let t = random_tree(25, seed).unwrap();
        let d = delta_hyperbolicity_slim(&t, 4);
        assert!(d.exact);
        assert_eq!(d.value(), Some(0));
    }
}

#[test]
fn cycle12_matches_triangle_enumeration() {
    let g = cycle(12).unwrap();
    let d = delta_hyperbolicity_slim(&g, 16);
    let tris = geodesic_triangles(&g, 16).unwrap();
    let brute = tris.iter().map(|t| t.slimness).max().unwrap();
    assert_eq!(d.value(), Some(brute));
    for t in &tris {
        assert_eq!(t.recheck(&g), Some(t.slimness));
    }
    let w = d.witness.unwrap();
    assert_eq!(w.recheck(&g), Some(brute));
}

#[test]
fn grid_bracket_contains_exact_value() {
    let g = square_grid(5, 5).unwrap();
    let exact = delta_hyperbolicity_slim(&g, 100);
    assert!(exact.exact);
    let bracket = delta_hyperbolicity_slim(&g, 2);
    assert!(!bracket.exact);
    assert!(bracket.truncated_pairs > 0);
    let v = exact.value().unwrap();
    assert!(bracket.lower <= v && v <= bracket.upper, "{:?} vs {}", bracket, v);
}

#[test]
fn treewidth_of_trees() {
    for seed in 0..4 {
        let t = random_tree(11, seed).unwrap();
        assert_eq!(treewidth_exact(&t).unwrap().0, 1);
    }
    assert!(matches!(treewidth_exact(&path(13).unwrap()), Err(SolverError::TooLarge { .. })));
}

#[test]
fn bramble_number_is_width_plus_one() {
    let mut graphs: Vec<Graph> = vec![complete(4).unwrap(), cycle(5).unwrap(), square_grid(2, 3).unwrap()];
    for seed in 0..6 {
        graphs.push(random_connected(6, 0.5, seed).unwrap());
    }
    for g in graphs {
        let (tw, _) = treewidth_exact(&g).unwrap();
        let h = haven_of_order(&g, tw + 1).unwrap().expect("haven of order tw+1");
        h.verify(&g, 100_000).unwrap();
        assert!(haven_of_order(&g, tw + 2).unwrap().is_none());
    }
}
