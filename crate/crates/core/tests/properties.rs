use gibbsbound::dynamics::{
    check_b_norm, glauber_step, influence_cap, influence_sum, taylor_influence_bound, ChainState,
};
use gibbsbound::graph::{
    delta_t, delta_t_backtrack, injection_count, injection_count_backtrack, num_pairs, Config,
    EdgeIndex, LabeledGraph, Motif,
};
use gibbsbound::meanfield::{solve_fixed_points, PhiPoly, DEFAULT_GRID, DEFAULT_TOL};
use gibbsbound::models::{detailed_balance_residual, exact_distribution, ErgmModel, GibbsModel};
use gibbsbound::bounds::PNorm;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn motifs() -> Vec<Motif> {
    vec![
        Motif::edge(),
        Motif::two_star(),
        Motif::triangle(),
        "v=4; edges=0-1,1-2,2-3".parse().unwrap(),
        "v=4; edges=0-1,1-2,2-3,3-0".parse().unwrap(),
        "v=4; edges=0-1,0-2,0-3".parse().unwrap(),
    ]
}

fn graph(n: usize, mask: u64) -> LabeledGraph {
    let dim = num_pairs(n);
    LabeledGraph::from_config(n, Config::from_mask(dim, mask & ((1u64 << dim) - 1))).unwrap()
}

fn relabel(g: &LabeledGraph, perm: &[usize]) -> LabeledGraph {
    let edges: Vec<_> = g.edges().iter().map(|&(i, j)| (perm[i], perm[j])).collect();
    LabeledGraph::from_edges(g.n(), &edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn injection_counts_agree_and_ignore_labels(
        n in 4usize..8,
        mask in any::<u64>(),
        k in 0usize..6,
        perm_seed in any::<u64>(),
    ) {
        let h = &motifs()[k];
        let g = graph(n, mask);
        let c = injection_count(h, &g).unwrap();
        prop_assert_eq!(c, injection_count_backtrack(h, &g).unwrap());
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = perm_seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(c, injection_count(h, &relabel(&g, &perm)).unwrap());
    }

    #[test]
    fn delta_counts_are_differences(n in 4usize..8, mask in any::<u64>(), k in 0usize..6, s in any::<prop::sample::Index>()) {
        let h = &motifs()[k];
        let g = graph(n, mask);
        let lin = s.index(num_pairs(n));
        let e = EdgeIndex::from_linear(lin, n).unwrap();
        let d = delta_t(h, &g, e).unwrap();
        prop_assert_eq!(d, delta_t_backtrack(h, &g, e).unwrap());
        let hi = injection_count(h, &g.with(lin, true)).unwrap();
        let lo = injection_count(h, &g.with(lin, false)).unwrap();
        prop_assert_eq!(d, hi - lo);
    }

    #[test]
    fn glauber_is_reversible_on_four_vertices(b1 in -2.0f64..2.0, b2 in -2.0f64..2.0, tri in any::<bool>()) {
        let m = if tri {
            ErgmModel::triangle(4, b1, b2).unwrap()
        } else {
            ErgmModel::two_star(4, b1, b2).unwrap()
        };
        let pi = exact_distribution(&m).unwrap();
        prop_assert!(detailed_balance_residual(&m, &pi) <= 1e-12);
    }

    #[test]
    fn influence_stays_under_the_cap(
        b1 in -1.5f64..1.5,
        b2 in -0.9f64..0.9,
        tri in any::<bool>(),
        mask in any::<u64>(),
        s in any::<prop::sample::Index>(),
    ) {
        let n = 8;
        let m = if tri {
            ErgmModel::triangle(n, b1, b2 / 3.0).unwrap()
        } else {
            ErgmModel::two_star(n, b1, b2).unwrap()
        };
        let dim = m.dim();
        let x = Config::from_mask(dim, mask & ((1u64 << dim) - 1));
        let ij = s.index(dim);
        let got = influence_sum(&m, &x, ij);
        let taylor = taylor_influence_bound(&m, &x, ij);
        prop_assert!(got <= taylor + 1e-12, "{got} > {taylor}");
        prop_assert!(taylor <= influence_cap(&m) + 1e-12);
    }

    #[test]
    fn b_norm_identity(entries in prop::collection::vec(0.0f64..1.0, 25), scale in 0.0f64..0.99) {
        let mut r = DMatrix::from_vec(5, 5, entries);
        for p in [PNorm::One, PNorm::Inf] {
            let norm = gibbsbound::bounds::matrix_norm(&r, p);
            if norm > 0.0 {
                r *= scale / norm;
            }
            let c = check_b_norm(&r, p);
            prop_assert!(c.holds);
            prop_assert!((c.b_norm - (1.0 - c.eps / 5.0)).abs() <= 1e-12);
        }
    }

    #[test]
    fn fixed_points_solve_the_equation(b1 in -3.0f64..3.0, b2 in -1.0f64..1.0, e2 in 2usize..4) {
        let p = PhiPoly::new(vec![(b1, 1), (b2, e2)]).unwrap();
        let roots = solve_fixed_points(&p, DEFAULT_GRID, DEFAULT_TOL).unwrap();
        prop_assert!(!roots.is_empty());
        for r in roots {
            prop_assert!((p.phi(r.a_star).unwrap() - r.a_star).abs() < 1e-9);
        }
    }

    #[test]
    fn chains_replay_from_the_seed(seed in any::<u64>(), stream in 0u64..8) {
        let m = ErgmModel::two_star(6, -0.3, 0.4).unwrap();
        let run = || {
            let mut st = ChainState::new(Config::zeros(m.dim()), seed, stream);
            (0..200).map(|_| glauber_step(&m, &mut st).site).collect::<Vec<_>>()
        };
        prop_assert_eq!(run(), run());
    }
}
