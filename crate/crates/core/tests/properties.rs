use proptest::prelude::*;

use pursuit::game::{replay, run_match, threat, GameParams, MatchOptions, Objective, Order, Status, Trace};
use pursuit::geometry::{build_fat_minor_grid, verify_fat_minor, Pattern, QiEmbedding};
use pursuit::graph::families::{cycle, random_connected, random_tree, subdivide};
use pursuit::graph::{Graph, Vertex};
use pursuit::solver::{best_response, copwin, delta_hyperbolicity_slim, haven_of_order, treewidth_exact, DEFAULT_BUDGET};
use pursuit::strategies::{ScriptKind, ScriptedCops};

fn small_graph() -> impl Strategy<Value = Graph> {
    (2usize..=12, 0.1f64..0.6, any::<u64>()).prop_map(|(n, p, seed)| random_connected(n, p, seed).unwrap())
}

fn bfs_all(g: &Graph) -> Vec<Vec<usize>> {
    (0..g.n()).map(|v| g.distance_field(&[v], usize::MAX).into_iter().map(|d| d.unwrap()).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn distances_form_a_metric(g in small_graph()) {
        let d = bfs_all(&g);
        for u in 0..g.n() {
            prop_assert_eq!(d[u][u], 0);
            for v in 0..g.n() {
                prop_assert_eq!(d[u][v], d[v][u]);
                prop_assert_eq!(g.dist_capped(u, v, g.n()).unwrap().finite(), Some(d[u][v]));
                for w in 0..g.n() {
                    prop_assert!(d[u][w] <= d[u][v] + d[v][w]);
                }
            }
        }
    }

    #[test]
    fn balls_grow_with_radius(g in small_graph(), r in 0usize..5) {
        for v in 0..g.n() {
            let a = g.ball(v, r, false).unwrap();
            let b = g.ball(v, r + 1, false).unwrap();
            prop_assert!(a.iter().all(|x| b.contains(x)));
            let bound: usize = (0..=r).map(|i| g.n().pow(i as u32)).sum();
            prop_assert!(a.len() <= bound.min(g.n()));
        }
    }

    #[test]
    fn multi_source_is_pointwise_minimum(g in small_graph(), mask in any::<u16>(), cap in 0usize..8) {
        let sources: Vec<Vertex> = (0..g.n()).filter(|v| mask >> v & 1 == 1).collect();
        prop_assume!(!sources.is_empty());
        let multi = g.multi_source_dist_capped(&sources, cap).unwrap();
        let d = bfs_all(&g);
        for v in 0..g.n() {
            let best = sources.iter().map(|&s| d[s][v]).min().unwrap();
            prop_assert_eq!(multi.get(&v).copied(), (best <= cap).then_some(best));
        }
    }

    #[test]
    fn subdivision_stretches_distances(n in 3usize..10, times in 1usize..4, seed in any::<u64>()) {
        let g = random_tree(n, seed).unwrap();
        let h = subdivide(&g, times);
        prop_assert_eq!(h.n(), n + (n - 1) * times);
        let dg = bfs_all(&g);
        for u in 0..n {
            let dh = h.distance_field(&[u], usize::MAX);
            for v in 0..n {
                prop_assert_eq!(dh[v], Some(dg[u][v] * (times + 1)));
            }
        }
    }

    #[test]
    fn trees_are_zero_hyperbolic_and_delta_is_label_free(n in 2usize..14, seed in any::<u64>(), perm_seed in any::<u64>()) {
        let g = random_tree(n, seed).unwrap();
        prop_assert_eq!(delta_hyperbolicity_slim(&g, 4).value(), Some(0));
        let c = cycle(n.max(3)).unwrap();
        let mut perm: Vec<Vertex> = (0..c.n()).collect();
        let mut s = perm_seed;
        for i in (1..perm.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let a = delta_hyperbolicity_slim(&c, 64);
        let b = delta_hyperbolicity_slim(&c.relabel(&perm), 64);
        prop_assert_eq!((a.lower, a.upper), (b.lower, b.upper));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bramble_number_is_treewidth_plus_one(n in 1usize..=7, p in 0.2f64..0.9, seed in any::<u64>()) {
        let g = random_connected(n, p, seed).unwrap();
        let (tw, d) = treewidth_exact(&g).unwrap();
        d.validate(&g).unwrap();
        prop_assert_eq!(d.width(), tw);
        prop_assert!(haven_of_order(&g, tw + 1).unwrap().is_some());
        prop_assert!(haven_of_order(&g, tw + 2).unwrap().is_none());
    }

    #[test]
    fn copwin_is_monotone_in_cops_and_reach(n in 3usize..=7, p in 0.2f64..0.7, seed in any::<u64>(), center in any::<prop::sample::Index>()) {
        let g = random_connected(n, p, seed).unwrap();
        let objective = Objective::ProtectBall { center: center.index(n), radius: 1 };
        let params = |cops, reach| GameParams { cops, cop_speed: 1, robber_speed: 1, reach, objective: objective.clone(), order: Order::Weak };
        for reach in 0..2 {
            let one = copwin(&g, &params(1, reach), DEFAULT_BUDGET).unwrap();
            let two = copwin(&g, &params(2, reach), DEFAULT_BUDGET).unwrap();
            let wider = copwin(&g, &params(1, reach + 1), DEFAULT_BUDGET).unwrap();
            prop_assert!(!one || two);
            prop_assert!(!one || wider);
        }
    }

    #[test]
    fn recorded_matches_replay_identically(n in 4usize..=9, p in 0.2f64..0.7, seed in any::<u64>(), cop_seed in any::<u64>()) {
        let g = random_connected(n, p, seed).unwrap();
        let params = GameParams {
            cops: 1,
            cop_speed: 1,
            robber_speed: 2,
            reach: 1,
            objective: Objective::ProtectFinite((0..n).collect()),
            order: Order::Weak,
        };
        let cops = ScriptedCops::new(ScriptKind::Random(cop_seed), 1, 1, 1);
        let mut robber = best_response(&g, &params, &cops, DEFAULT_BUDGET).unwrap();
        let mut c = cops.clone();
        let res = run_match(&g, Order::Weak, &mut c, &mut robber, &MatchOptions { horizon: 200, ..Default::default() });
        let back = Trace::parse(&res.trace.to_text()).unwrap();
        let statuses = replay(&g, &back).unwrap();
        let recorded: Vec<Status> = back.records.iter().map(|r| r.status).collect();
        prop_assert_eq!(&statuses, &recorded);
        let last = back.records.last().unwrap();
        let reach = back.params.as_ref().unwrap().reach;
        prop_assert_eq!(last.status == Status::Captured, threat(&g, &last.cops, last.robber, reach).is_some());
    }

    #[test]
    fn fat_minor_witnesses_recheck(fatness in 2usize..7, which in 0usize..3, shift in 1usize..4) {
        let mut m = build_fat_minor_grid(Pattern::Complete(3), fatness, 2).unwrap();
        prop_assert!(verify_fat_minor(&m).passed());
        let w = m.host.grid().unwrap();
        let (x, y) = w.decode(m.branches[which][0]);
        let other = (which + 1) % 3;
        let (ox, oy) = w.decode(m.branches[other][0]);
        let step = |a: i64, b: i64| a + (b - a).signum() * shift as i64;
        if let Some(v) = w.encode(step(x, ox), step(y, oy)) {
            if !m.branches[which].contains(&v) {
                m.branches[which].push(v);
                m.branches[which].sort_unstable();
            }
        }
        let r = verify_fat_minor(&m);
        for v in &r.violations {
            if let Some((a, b, d)) = v.witness {
                prop_assert!(d < m.fatness);
                prop_assert_eq!(m.host.dist_capped(a, b, m.host.n()).unwrap().finite(), Some(d));
            }
        }
    }

    #[test]
    fn image_walks_stay_near_the_image(n in 3usize..9, times in 1usize..3, seed in any::<u64>(), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let g = random_tree(n, seed).unwrap();
        let emb = QiEmbedding::subdivision(g.clone(), times).unwrap();
        let (x, y) = (a.index(n), b.index(n));
        let (walk, segments) = emb.image_walk(emb.map[x], emb.map[y]).unwrap();
        let dg = g.dist_capped(x, y, n).unwrap().finite().unwrap();
        prop_assert!(walk.iter().all(|&v| emb.dist_to_image(v) <= emb.c));
        prop_assert!(emb.target.is_walk(&walk));
        prop_assert!(segments <= emb.c * dg + emb.c * emb.c);
        prop_assert!(walk.len() - 1 <= 2 * emb.c * segments.max(1));
    }
}
