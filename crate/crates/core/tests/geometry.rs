use std::rc::Rc;

use pursuit::game::{
    robber_reach_from, run_match, AgentError, GameParams, GameState, MatchOptions, Objective, Order, RobberAgent, Verdict,
};
use pursuit::geometry::{
    build_fat_minor_grid, shadow_project, simulate_transfer, verify_fat_minor, verify_qi_embedding, Condition, FatMinorModel,
    Pattern, Projection, QiEmbedding, ShadowClass, TransferConstants, VirtualCop, Wanderer,
};
use pursuit::graph::families::{complete, cycle, grid_window, path, random_connected, square_grid};
use pursuit::graph::{Graph, Vertex};
use pursuit::strategies::{ScriptKind, ScriptedCops};

fn model(pattern: Pattern, fatness: usize) -> FatMinorModel {
    build_fat_minor_grid(pattern, fatness, 2).expect("construction")
}

#[test]
fn k4_at_fatness_six_passes() {
    let m = model(Pattern::Complete(4), 6);
    assert_eq!(m.branches.len(), 4);
    assert_eq!(m.paths.len(), 6);
    let r = verify_fat_minor(&m);
    assert!(r.passed(), "{}", r);
    assert_eq!(r.checked.len(), 5);
}

#[test]
fn k2_at_fatness_one_passes() {
    let m = model(Pattern::Complete(2), 1);
    assert_eq!(m.branches.len(), 2);
    assert_eq!(m.paths.len(), 1);
    assert!(verify_fat_minor(&m).passed());
}

#[test]
fn three_by_three_grid_pattern_at_fatness_four() {
    let m = model(Pattern::Grid(3), 4);
    assert_eq!(m.branches.len(), 9);
    assert_eq!(m.paths.len(), 12);
    assert!(verify_fat_minor(&m).passed());
}

#[test]
fn branch_sets_moved_together_fail_with_witness() {
    let mut m = model(Pattern::Complete(4), 6);
    let w = m.host.grid().unwrap();
    // Replace branch 1 with a single vertex next to branch 0.
    let anchor = m.branches[0][0];
    let (x, y) = w.decode(anchor);
    let near = w.encode(x - 1, y).or_else(|| w.encode(x, y - 1)).unwrap();
    m.branches[1] = vec![near];
    let r = verify_fat_minor(&m);
    assert!(!r.passed());
    let v = r.first_failure(Condition::BranchDistance).expect("branch distance violation");
    let (a, b, d) = v.witness.expect("witness");
    assert!(d < m.fatness);
    assert_eq!(m.host.dist_capped(a, b, m.fatness).unwrap().finite(), Some(d));
}

#[test]
fn single_edge_model_at_exact_distance() {
    let d = 5;
    let host = path(d + 1).unwrap();
    let m = FatMinorModel {
        host,
        pattern: complete(2).unwrap(),
        branches: vec![vec![0], vec![d]],
        paths: vec![((0, 1), (0..=d).collect())],
        fatness: d,
    };
    assert!(verify_fat_minor(&m).passed());
    let m2 = FatMinorModel { fatness: d + 1, ..m };
    let r = verify_fat_minor(&m2);
    assert!(r.first_failure(Condition::BranchDistance).is_some());
}

#[test]
fn model_text_round_trip() {
    let m = model(Pattern::Grid(2), 4);
    let back = FatMinorModel::parse(&m.to_text()).expect("parse");
    assert_eq!(back.branches, m.branches);
    assert_eq!(back.paths, m.paths);
    assert_eq!(back.fatness, m.fatness);
    assert_eq!(back.host.n(), m.host.n());
    assert_eq!(back.pattern.edges(), m.pattern.edges());
    assert!(verify_fat_minor(&back).passed());

    let explicit = FatMinorModel {
        host: path(6).unwrap(),
        pattern: complete(2).unwrap(),
        branches: vec![vec![0], vec![5]],
        paths: vec![((0, 1), (0..6).collect())],
        fatness: 5,
    };
    let back = FatMinorModel::parse(&explicit.to_text()).expect("parse");
    assert_eq!(back.host.edges(), explicit.host.edges());
    assert!(verify_fat_minor(&back).passed());
}

#[test]
fn projection_matches_distance_rule() {
    for (pattern, fatness) in [(Pattern::Complete(3), 6), (Pattern::Grid(2), 8)] {
        let m = model(pattern, fatness);
        let p = Projection::new(&m);
        let radius = m.fatness / 2 - 1;
        let near = |v: Vertex, set: &[Vertex]| m.host.dist_to_set(v, set, radius).unwrap().within(radius);
        for v in 0..m.host.n() {
            let mut expect: Vec<Vertex> = (0..m.branches.len()).filter(|&u| near(v, &m.branches[u])).collect();
            if expect.is_empty() {
                expect = m.paths.iter().filter(|(_, path)| near(v, path)).map(|((x, _), _)| *x).collect();
                expect.sort_unstable();
                expect.dedup();
            }
            assert_eq!(p.of(v), expect.as_slice(), "vertex {}", v);
        }
        assert_eq!(p.ambiguous(), 0);
    }
}

#[test]
fn shadow_projection_matches_linear_scan() {
    for seed in 0..20u64 {
        let h = random_connected(30, 0.12, seed).unwrap();
        let set: Vec<Vertex> = (0..h.n()).filter(|v| (v * 7 + seed as usize) % 5 == 0).collect();
        for v in 0..h.n() {
            let dists = h.distance_field(&[v], usize::MAX);
            let best = set.iter().map(|&u| dists[u].unwrap()).min().unwrap();
            let expect: Vec<Vertex> = set.iter().copied().filter(|&u| dists[u] == Some(best)).collect();
            assert_eq!(shadow_project(&h, &set, v), expect, "seed {} vertex {}", seed, v);
        }
    }
}

#[test]
fn shadow_projection_onto_even_row() {
    let h = grid_window(0, 9, 0, 2).unwrap();
    let w = h.grid().unwrap();
    let row: Vec<Vertex> = (0..10).map(|x| w.encode(x, 0).unwrap()).collect();
    let v = w.encode(4, 1).unwrap();
    assert_eq!(shadow_project(&h, &row, v), vec![w.encode(4, 0).unwrap()]);
    let on = w.encode(3, 0).unwrap();
    assert_eq!(shadow_project(&h, &row, on), vec![on]);
}

#[test]
fn transfer_constants_for_unit_parameters() {
    let k = TransferConstants::new(1, 1, 1, 1);
    assert_eq!(k.rho_u, 35);
    assert_eq!(k.s_u, 500);
    assert_eq!(k.s_g, 501);
    assert_eq!(k.rho_g, 36);
    assert_eq!(k.s_star, 5);
}

#[test]
fn transfer_constants_match_formulas() {
    for c in 1..=4usize {
        for s in 1..=3usize {
            for rho in 0..=3usize {
                for s_r in 1..=3usize {
                    let k = TransferConstants::new(c, s, rho, s_r);
                    let s_u = 500 * c * c * c * s;
                    let rho_u = 2 * rho + c + 16 * c * c * c * (rho + c);
                    assert_eq!(k.s_u, s_u);
                    assert_eq!(k.rho_u, rho_u);
                    assert_eq!(k.s_g, c * s_u + c * c);
                    assert_eq!(k.rho_g, c * rho_u + c * c);
                    assert_eq!(k.s_star, 5 * c * c * c * s_r);
                }
            }
        }
    }
}

#[test]
fn identity_embedding_is_exact_and_shadows_coincide() {
    let g = square_grid(6, 6).unwrap();
    let emb = QiEmbedding::new(g.clone(), g, (0..36).collect(), 1).unwrap();
    let r = verify_qi_embedding(&emb, 100_000, 1);
    assert!(r.passed() && r.exhaustive);
    assert_eq!(r.pairs, 36 * 35 / 2);

    let k = TransferConstants::new(1, 1, 1, 1);
    let mut cop = VirtualCop::new(&emb, &k, 0);
    for v in [0usize, 1, 7, 13, 14, 20] {
        let st = cop.step(&emb, &k, v);
        assert!(st.failures.is_empty());
        assert_eq!(cop.shadow, v);
        assert_eq!(cop.class, ShadowClass::Safe1);
    }
}

#[test]
fn collapsing_map_fails_lower_bound() {
    let g = path(10).unwrap();
    let emb = QiEmbedding::new(g.clone(), g, vec![0; 10], 1).unwrap();
    let r = verify_qi_embedding(&emb, 1000, 1);
    assert!(!r.passed());
    assert!(r.violations.iter().all(|v| v.lower));
}

#[test]
fn path_row_embedding_is_isometric() {
    let emb = QiEmbedding::path_row(40, 3, 3).unwrap();
    assert!(verify_qi_embedding(&emb, 100_000, 1).passed());
}

#[test]
fn wandering_cop_keeps_shadow_rules() {
    let emb = QiEmbedding::path_row(300, 5, 150).unwrap();
    let k = TransferConstants::new(1, 1, 1, 1);
    let mut w = Wanderer::away_and_back(&emb, 1, 12, 1, 1, 3);
    let rep = simulate_transfer(&emb, &k, &mut w, 3000);
    assert!(rep.passed(), "{}", rep);
    assert!(rep.max_far_from_image > 32, "{}", rep);
    assert!(rep.far_moves > 0, "{}", rep);
}

#[test]
fn subdivision_embedding_transfer() {
    let emb = QiEmbedding::subdivision(cycle(12).unwrap(), 2).unwrap();
    assert_eq!(emb.c, 3);
    assert!(verify_qi_embedding(&emb, 100_000, 1).passed());
    let k = TransferConstants::new(3, 1, 1, 1);
    let mut w = Wanderer::away_and_back(&emb, 1, 4, 1, 1, 5);
    let rep = simulate_transfer(&emb, &k, &mut w, 300);
    assert!(rep.passed(), "{}", rep);
}

/// Moves to the reachable vertex farthest from the cops.
struct Farthest;

impl Farthest {
    fn best(g: &Graph, cops: &[Vertex], from: Vertex, speed: usize, reach: usize) -> Vec<Vertex> {
        let r = robber_reach_from(g, cops, from, speed, reach);
        let field = g.distance_field(cops, usize::MAX);
        let target = r.reachable().into_iter().max_by_key(|&v| (field[v], std::cmp::Reverse(v))).unwrap_or(from);
        r.path_to(target).unwrap_or_else(|| vec![from])
    }
}

impl RobberAgent for Farthest {
    fn name(&self) -> String {
        "farthest".into()
    }

    fn speed(&mut self, g: &Graph, _cop_speed: usize, _reach: Option<usize>) -> Result<usize, AgentError> {
        Ok(g.n())
    }

    fn objective(&mut self, g: &Graph, _cop_speed: usize, _robber_speed: usize, _reach: usize) -> Result<Objective, AgentError> {
        Ok(Objective::ProtectFinite((0..g.n()).collect()))
    }

    fn place(&mut self, g: &Graph, _params: &GameParams, cops: &[Vertex]) -> Result<Vertex, AgentError> {
        let field = g.distance_field(cops, usize::MAX);
        Ok((0..g.n()).max_by_key(|&v| (field[v], std::cmp::Reverse(v))).unwrap())
    }

    fn step(&mut self, g: &Graph, params: &GameParams, state: &GameState) -> Result<Vec<Vertex>, AgentError> {
        Ok(Self::best(g, &state.cops, state.robber, params.robber_speed, params.reach))
    }
}

#[test]
fn lifted_robber_evades_through_identity_embedding() {
    let n = 1200;
    let g = cycle(n).unwrap();
    let emb = Rc::new(QiEmbedding::new(g.clone(), g.clone(), (0..n).collect(), 1).unwrap());
    let mut robber = pursuit::geometry::LiftedRobber::new(Rc::clone(&emb), Farthest);
    let mut cops = ScriptedCops::new(ScriptKind::Greedy, 1, 1, 1);
    let res = run_match(&g, Order::Weak, &mut cops, &mut robber, &MatchOptions { horizon: 3 * n, record: false, ..Default::default() });
    assert!(matches!(res.verdict, Verdict::CertifiedRobberWin { .. }), "{}", res.verdict);
    assert_eq!(res.robber_counters.get("virtual_captures").copied().unwrap_or(0), 0);
    assert!(res.robber_counters.get("shadow_checks").copied().unwrap_or(0) > 0);
}
