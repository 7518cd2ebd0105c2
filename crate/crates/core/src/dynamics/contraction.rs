use crate::bounds::hightemp_f;
use crate::error::{domain, Error, Result};
use crate::graph::{delta2_t, delta_t, num_pairs, Config, GraphView, Motif};
use crate::meanfield::{FixedPoint, PhiPoly, C2};
use crate::models::{ErgmModel, GibbsModel, IsingModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoReport {
    /// The larger valid rate.
    pub rho: f64,
    /// `(1 - ½|Φ|'(1)) / C(n,2)`.
    pub rho_abs: f64,
    /// `(1 - f(ε)) / C(n,2)` when `ε` was supplied.
    pub rho_refined: Option<f64>,
    pub refined_chosen: bool,
}

/// `½|Φ|'(1)`, the uniform cap on [`influence_sum`](super::influence_sum)
/// for ERGMs.
pub fn influence_cap(m: &ErgmModel) -> f64 {
    0.5 * PhiPoly::from_model(m).abs_phi_prime(1.0)
}

/// One-step contraction rate for the ERGM Glauber coupling.
///
/// With `eps` the refined rate is computed as well; it requires a fixed
/// point and nonnegative coefficients on every non-edge motif.
pub fn contraction_rho(m: &ErgmModel, fp: Option<&FixedPoint>, eps: Option<f64>) -> Result<RhoReport> {
    let pairs = num_pairs(m.n()) as f64;
    let p = PhiPoly::from_model(m);
    let rho_abs = (1.0 - 0.5 * p.abs_phi_prime(1.0)) / pairs;
    let rho_refined = match eps {
        None => None,
        Some(e) => {
            if !(0.0..=1.0).contains(&e) {
                return domain(format!("ε = {e} is outside [0, 1]"));
            }
            if m.terms()[1..].iter().any(|(_, b)| *b < 0.0) {
                return domain("the refined rate needs β_ℓ ≥ 0 for every non-edge motif");
            }
            let Some(fp) = fp else {
                return domain("the refined rate needs a fixed point");
            };
            Some((1.0 - hightemp_f(&p, fp.a_star, e, m.n())) / pairs)
        }
    };
    let refined_chosen = rho_refined.is_some_and(|r| r > rho_abs);
    let rho = if refined_chosen { rho_refined.unwrap() } else { rho_abs };
    if rho <= 0.0 {
        return Err(Error::NoContraction(format!(
            "ρ = {rho_abs} from |Φ|'(1){}",
            rho_refined.map_or(String::new(), |r| format!(", refined ρ = {r}"))
        )));
    }
    Ok(RhoReport {
        rho,
        rho_abs,
        rho_refined,
        refined_chosen,
    })
}

/// `(1 - r tanh(β/N)) / N` with `r` the largest neighborhood size.
pub fn ising_rho(m: &IsingModel) -> f64 {
    let nf = m.n() as f64;
    (1.0 - m.max_degree() as f64 * (m.beta() / nf).tanh()) / nf
}

/// The motifs whose `r_H` the ε-region constrains: every `H_ℓ` and every
/// `H_ℓ \ e` for `ℓ ≥ 2`, keeping only those with at least two edges.
pub fn region_motifs(m: &ErgmModel) -> Vec<Motif> {
    let mut out: Vec<Motif> = Vec::new();
    for (h, _) in &m.terms()[1..] {
        let mut push = |g: Motif| {
            if g.e() >= 2 && !out.contains(&g) {
                out.push(g);
            }
        };
        push(h.clone());
        for e in 0..h.e() {
            push(h.without_edge(e).expect("edge index in range"));
        }
    }
    out
}

/// Whether `|r_H(x^{(ij,b)}; st) - a*| ≤ ε` for every `ij ≠ st`, `b ∈ {0,1}`
/// and every motif of [`region_motifs`].
pub fn region_check(m: &ErgmModel, x: &Config, eps: f64, a_star: f64) -> bool {
    let n = m.n();
    let dim = m.dim();
    if dim < 2 {
        return true;
    }
    let g = GraphView::new(n, x);
    let motifs = region_motifs(m);
    let ok = |h: &Motif, delta: f64| (crate::graph::r_from_delta(h, n, delta) - a_star).abs() <= eps;
    for h in &motifs {
        let local = h.v() <= 3;
        for st in 0..dim {
            let es = m.edge_index(st);
            let base = delta_t(h, &g, es).expect("valid pair") as f64;
            if !ok(h, base) {
                return false;
            }
            for ij in 0..dim {
                if ij == st {
                    continue;
                }
                let eij = m.edge_index(ij);
                if local && !es.touches(&eij) {
                    continue;
                }
                // Δ_st t is affine in x_ij with slope Δ_ij Δ_st t.
                let d2 = delta2_t(h, &g, es, eij).expect("distinct pairs") as f64;
                let flipped = if x.get(ij) { base - d2 } else { base + d2 };
                if !ok(h, flipped) {
                    return false;
                }
            }
        }
    }
    true
}

/// State-dependent form of the refined influence estimate, with the
/// minimum taken separately for every `st`:
/// `Σ_{st≠ij} ¼ D_st · min{1, sech²(½ Δ_st L(x^{(ij,0)})) + ¼ C₂ D_st}`
/// where `D_st = Σ_ℓ |β_ℓ| Δ_st Δ_ij t_ℓ(x)`.
pub fn taylor_influence_bound(m: &ErgmModel, x: &Config, ij: usize) -> f64 {
    let n = m.n();
    let g = GraphView::new(n, x);
    let down = x.with(ij, false);
    let eij = m.edge_index(ij);
    (0..m.dim())
        .filter(|&st| st != ij)
        .map(|st| {
            let es = m.edge_index(st);
            let d: f64 = m
                .terms()
                .iter()
                .enumerate()
                .filter(|(_, (_, b))| *b != 0.0)
                .map(|(l, (h, b))| {
                    b.abs() * delta2_t(h, &g, es, eij).expect("distinct pairs") as f64 / m.denominator(l)
                })
                .sum();
            if d == 0.0 {
                return 0.0;
            }
            let arg = 0.5 * m.delta_l(&down, st);
            let sech2 = 1.0 / arg.cosh().powi(2);
            0.25 * d * (sech2 + 0.25 * C2 * d).min(1.0)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::influence_sum;
    use crate::graph::LabeledGraph;
    use crate::meanfield::{solve_fixed_points, DEFAULT_GRID, DEFAULT_TOL};
    use crate::stats::substream;
    use rand::Rng;

    fn random_config(n: usize, seed: u64) -> Config {
        let mut rng = substream(seed, 0);
        let bits: Vec<bool> = (0..num_pairs(n)).map(|_| rng.gen::<bool>()).collect();
        Config::from_bools(&bits)
    }

    #[test]
    fn zero_beta_rate_is_one_over_n() {
        let m = ErgmModel::triangle(6, 0.0, 0.0).unwrap();
        let r = contraction_rho(&m, None, None).unwrap();
        assert!((r.rho - 1.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn two_star_rate_uses_abs_phi_prime() {
        let m = ErgmModel::two_star(20, -0.3, -0.5).unwrap();
        let r = contraction_rho(&m, None, None).unwrap();
        assert!((r.rho - 0.5 / 190.0).abs() < 1e-15);
        assert!(r.rho_refined.is_none());
    }

    #[test]
    fn no_contraction_is_an_error() {
        let m = ErgmModel::two_star(10, 0.0, -1.2).unwrap();
        assert!(matches!(contraction_rho(&m, None, None), Err(Error::NoContraction(_))));
    }

    #[test]
    fn refined_rate_needs_positive_betas_and_a_fixed_point() {
        let neg = ErgmModel::two_star(10, 0.0, -0.2).unwrap();
        let fp = FixedPoint::at(&PhiPoly::from_model(&neg), 0.5);
        assert!(contraction_rho(&neg, Some(&fp), Some(0.1)).is_err());
        let pos = ErgmModel::two_star(10, -1.0, 0.3).unwrap();
        assert!(contraction_rho(&pos, None, Some(0.1)).is_err());
    }

    #[test]
    fn refined_rate_wins_at_small_eps() {
        let m = ErgmModel::triangle(40, -1.0, 0.4).unwrap();
        let p = PhiPoly::from_model(&m);
        let fp = solve_fixed_points(&p, DEFAULT_GRID, DEFAULT_TOL).unwrap()[0];
        let r = contraction_rho(&m, Some(&fp), Some(0.01)).unwrap();
        assert!(r.refined_chosen);
        assert!(r.rho > r.rho_abs);
        let direct = (1.0 - hightemp_f(&p, fp.a_star, 0.01, 40)) / 780.0;
        assert_eq!(r.rho, direct);
    }

    #[test]
    fn ising_rate_on_complete_graph() {
        let m = IsingModel::complete(5, 0.8).unwrap();
        assert!((ising_rho(&m) - (1.0 - 4.0 * (0.16f64).tanh()) / 5.0).abs() < 1e-15);
    }

    #[test]
    fn influence_sum_is_capped() {
        for (m, seed) in [
            (ErgmModel::two_star(7, 0.4, -0.9).unwrap(), 1),
            (ErgmModel::triangle(7, -0.2, 1.7).unwrap(), 2),
        ] {
            let cap = influence_cap(&m);
            for k in 0..50 {
                let x = random_config(7, seed * 100 + k);
                for ij in [0, 5, 20] {
                    let s = influence_sum(&m, &x, ij);
                    let t = taylor_influence_bound(&m, &x, ij);
                    assert!(s <= t + 1e-12, "{s} > {t}");
                    assert!(t <= cap + 1e-12, "{t} > {cap}");
                }
            }
        }
    }

    #[test]
    fn triangle_influence_on_complete_graph() {
        let m = ErgmModel::triangle(4, 0.0, 0.9).unwrap();
        let x = Config::ones(6);
        let s = influence_sum(&m, &x, 0);
        // Four pairs touch edge 0; each loses one common neighbor without it.
        let q_up = crate::models::logistic(0.9 * 12.0 / 4.0);
        let q_down = crate::models::logistic(0.9 * 6.0 / 4.0);
        let want = 4.0 * (q_up - q_down).abs();
        assert!((s - want).abs() < 1e-12, "{s} vs {want}");
        assert!(s <= 3.0 * 0.9);
    }

    #[test]
    fn region_with_unit_eps_always_holds() {
        let m = ErgmModel::triangle(6, -0.5, 0.8).unwrap();
        for k in 0..20 {
            assert!(region_check(&m, &random_config(6, k), 1.0, 0.3));
        }
    }

    #[test]
    fn complete_graph_is_outside_a_small_region() {
        let m = ErgmModel::triangle(8, -2.0, 0.2).unwrap();
        let x = LabeledGraph::complete(8).into_config();
        assert!(!region_check(&m, &x, 0.1, 0.15));
    }

    #[test]
    fn region_motifs_of_the_triangle() {
        let m = ErgmModel::triangle(5, 0.0, 1.0).unwrap();
        let ms = region_motifs(&m);
        assert_eq!(ms.len(), 4);
        assert_eq!(ms[0].e(), 3);
        assert!(ms[1..].iter().all(|h| h.e() == 2));
    }
}
