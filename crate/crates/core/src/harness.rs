//! End-to-end checks: estimate `|E h(X) - E h(Z)|` and set it against a
//! computed bound.

use rayon::prelude::*;

use crate::bounds::{
    bound_general_pnorm, bound_ising, bound_key1, bound_negbetas, bound_smallbetas, bound_triangle,
    bound_twostar, expected_v_norm, florentine_displayed, BoundReport, Estimator, PNorm, TestFunction,
    TestKind, Theorem,
};
use crate::dynamics::{burn_in_steps, contraction_rho, ising_rho, sample_path, AnalyticInfluence, ChainState};
use crate::error::{domain, Error, Result};
use crate::graph::{falling, injection_count, num_pairs, read_edge_list, Config, Motif, MotifKind};
use crate::meanfield::{
    ergm_reference_law, ising_fixed_point, ising_reference_law, solve_fixed_points, FixedPoint,
    IsingBranch, PhiPoly, DEFAULT_GRID, DEFAULT_TOL,
};
use crate::models::{exact_distribution, GibbsModel, Model, ProductLaw, MAX_EXACT_DIM};
use crate::stats::{batch_means, exact_product_expectation, mc_mean, Estimate};

/// Number of batches (and parallel chains) behind an MCMC error bar.
pub const MCMC_BATCHES: usize = 30;

/// Half-widths a gap must clear before it counts as a violation.
pub const GUARD: f64 = 3.0;

/// Residual allowed when turning a fixed point into a reference law.
pub const REFERENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Exact,
    /// `MCMC_BATCHES` independent chains from the empty state, each burned
    /// in for `burn` steps (default from the dimension) and thinned every `N`.
    Mcmc { samples: usize, seed: u64, burn: Option<u64> },
    /// Independent draws; product laws only.
    Iid { samples: usize, seed: u64 },
}

/// What `E h` is taken under.
#[derive(Clone, Copy)]
pub enum Target<'a> {
    Gibbs(&'a dyn GibbsModel),
    Product(&'a ProductLaw),
}

impl Target<'_> {
    fn dim(&self) -> usize {
        match self {
            Target::Gibbs(m) => m.dim(),
            Target::Product(l) => l.p().len(),
        }
    }
}

/// `n` with `C(n,2) = dim`, if there is one.
fn vertices_for(dim: usize) -> Option<usize> {
    let n = ((1.0 + (1.0 + 8.0 * dim as f64).sqrt()) / 2.0).round() as usize;
    (num_pairs(n) == dim).then_some(n)
}

/// Burn-in used when none is given: the graph rule when `N = C(n,2)`,
/// otherwise `⌈10 N ln N⌉`.
pub fn default_burn(dim: usize) -> u64 {
    match vertices_for(dim) {
        Some(n) if n >= 2 => burn_in_steps(n),
        _ => {
            let nf = dim.max(2) as f64;
            (10.0 * nf * nf.ln()).ceil() as u64
        }
    }
}

/// `E h` with its standard error (zero for exact).
pub fn expect_h(target: Target<'_>, h: &TestFunction, method: Method) -> Result<Estimate> {
    let dim = target.dim();
    if h.c.len() != dim {
        return domain(format!("test function has {} coordinates, target has {dim}", h.c.len()));
    }
    match (method, target) {
        (Method::Exact, Target::Product(law)) => {
            exact_product_expectation(law, |x| h.eval(x)).map(Estimate::exact)
        }
        (Method::Exact, Target::Gibbs(m)) => {
            Ok(Estimate::exact(exact_distribution(m)?.expect(|x| h.eval(x))))
        }
        (Method::Iid { samples, seed }, Target::Product(law)) => {
            mc_mean(samples, seed, |rng| h.eval(&law.sample(rng)))
        }
        (Method::Iid { .. }, Target::Gibbs(_)) => domain("independent sampling needs a product law"),
        (Method::Mcmc { samples, seed, burn }, t) => {
            let model: &dyn GibbsModel = match t {
                Target::Gibbs(m) => m,
                Target::Product(l) => l,
            };
            if samples < MCMC_BATCHES {
                return domain(format!("MCMC needs at least {MCMC_BATCHES} samples"));
            }
            let per = samples.div_ceil(MCMC_BATCHES);
            let burn = burn.unwrap_or_else(|| default_burn(dim));
            let paths: Vec<Vec<f64>> = (0..MCMC_BATCHES)
                .into_par_iter()
                .map(|c| {
                    let mut st = ChainState::new(Config::zeros(dim), seed, c as u64);
                    sample_path(model, &mut st, burn, dim as u64, per, |x| h.eval(x))
                })
                .collect();
            let flat: Vec<f64> = paths.into_iter().flatten().collect();
            batch_means(&flat, MCMC_BATCHES)
        }
    }
}

/// `E h(Z)` in closed form where one is available.
pub fn product_expectation_closed(law: &ProductLaw, h: &TestFunction) -> Option<f64> {
    let p = law.p();
    match &h.kind {
        TestKind::EdgeDensity => Some(p.iter().sum::<f64>() / p.len() as f64),
        TestKind::Linear(w) => Some(w.iter().zip(p).map(|(a, b)| a * b).sum()),
        TestKind::HomDensity { motif, n } => {
            let a = p[0];
            if p.iter().any(|q| *q != a) {
                return None;
            }
            Some(falling(*n, motif.v()) * a.powi(motif.e() as i32) / (*n as f64).powi(motif.v() as i32))
        }
    }
}

/// The product law a theorem compares against: Erdős–Rényi(`a*`) for
/// ERGMs, the symmetric mean-field solution for Ising models.
pub fn reference_law(model: &Model, fp: Option<&FixedPoint>) -> Result<ProductLaw> {
    match model {
        Model::Ergm(m) => {
            let Some(fp) = fp else {
                return domain("an ERGM reference law needs a fixed point");
            };
            ergm_reference_law(m, fp, REFERENCE_TOL)
        }
        Model::Ising(m) => {
            let p = ising_fixed_point(m, DEFAULT_TOL, IsingBranch::Symmetric)?;
            ising_reference_law(m, &p, REFERENCE_TOL)
        }
    }
}

fn two_term(model: &Model, kind: MotifKind, theorem: Theorem) -> Result<(usize, f64, f64)> {
    match model {
        Model::Ergm(m) if m.terms().len() == 2 && m.terms()[1].0.kind() == kind => {
            Ok((m.n(), m.terms()[0].1, m.terms()[1].1))
        }
        _ => domain(format!("{theorem} needs an edge + {kind:?} ERGM")),
    }
}

/// Evaluates `theorem` on `model`, scaled by `‖Δh‖` (the p-norm bound
/// carries `‖c‖_q` from `h` instead).
pub fn compute_bound(
    model: &Model,
    theorem: Theorem,
    fp: Option<&FixedPoint>,
    h: &TestFunction,
    est: Estimator,
    p: PNorm,
) -> Result<BoundReport> {
    let need_fp = || fp.ok_or_else(|| Error::Domain(format!("{theorem} needs a fixed point")));
    let report = match theorem {
        Theorem::Key1 => {
            let law = reference_law(model, fp)?;
            let rho = match model {
                Model::Ergm(m) => contraction_rho(m, None, None)?.rho,
                Model::Ising(m) => {
                    let r = ising_rho(m);
                    if r <= 0.0 {
                        return Err(Error::NoContraction(format!("Ising ρ = {r}")));
                    }
                    r
                }
            };
            bound_key1(model, &law, rho, est)?
        }
        Theorem::IsingCwbd => match model {
            Model::Ising(m) => bound_ising(m),
            Model::Ergm(_) => return domain("ising_cwbd needs an Ising model"),
        },
        Theorem::SmallBetas | Theorem::NegBetas => match model {
            Model::Ergm(m) if theorem == Theorem::SmallBetas => bound_smallbetas(m, need_fp()?)?,
            Model::Ergm(m) => bound_negbetas(m, need_fp()?)?,
            Model::Ising(_) => return domain(format!("{theorem} needs an ERGM")),
        },
        Theorem::TwoStar => {
            let (n, b1, b2) = two_term(model, MotifKind::TwoStar, theorem)?;
            bound_twostar(n, b1, b2, need_fp()?)?
        }
        Theorem::Triangle => {
            let (n, b1, b2) = two_term(model, MotifKind::Triangle, theorem)?;
            bound_triangle(n, b1, b2, need_fp()?)?
        }
        Theorem::KeyPnorm => {
            let law = reference_law(model, fp)?;
            let r = model.analytic_influence();
            let ev = expected_v_norm(model, &law, p, est)?;
            let mut rep = bound_general_pnorm(&r, p, &h.c, ev)?;
            rep.delta_norm = Some(h.delta_norm);
            return Ok(rep);
        }
    };
    Ok(report.scaled(h.delta_norm))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    BoundHolds,
    BoundViolatedWithinCi,
    Inconclusive,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::BoundHolds => "bound_holds",
            Verdict::BoundViolatedWithinCi => "bound_violated_within_ci",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Exact gaps are compared directly; estimated gaps must clear the bound
/// by `GUARD` half-widths either way.
pub fn judge(gap: Estimate, exact: bool, bound: f64) -> Verdict {
    if exact {
        return if gap.value <= bound {
            Verdict::BoundHolds
        } else {
            Verdict::BoundViolatedWithinCi
        };
    }
    let hw = GUARD * gap.half_width();
    if gap.value - hw > bound {
        Verdict::BoundViolatedWithinCi
    } else if gap.value + hw <= bound {
        Verdict::BoundHolds
    } else {
        Verdict::Inconclusive
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub samples: usize,
    pub seed: u64,
    /// Largest `N` handled by exact enumeration.
    pub exact_limit: usize,
    pub burn: Option<u64>,
}

impl Budget {
    pub fn new(samples: usize, seed: u64) -> Self {
        Budget {
            samples,
            seed,
            exact_limit: 12,
            burn: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationRun {
    pub test_function: String,
    pub report: BoundReport,
    /// Bound already multiplied by `‖Δh‖`.
    pub bound: f64,
    pub e_x: Estimate,
    pub e_z: Estimate,
    pub gap: Estimate,
    pub exact_gap: Option<f64>,
    pub verdict: Verdict,
}

/// Computes the bound, estimates both sides and judges the gap.
pub fn verify_bound(
    model: &Model,
    fp: Option<&FixedPoint>,
    h: &TestFunction,
    theorem: Theorem,
    budget: &Budget,
) -> Result<VerificationRun> {
    let dim = model.dim();
    let exact = dim <= budget.exact_limit.min(MAX_EXACT_DIM);
    let est = if exact {
        Estimator::Exact
    } else {
        Estimator::MonteCarlo {
            samples: budget.samples,
            seed: budget.seed,
        }
    };
    let report = compute_bound(model, theorem, fp, h, est, PNorm::One)?;
    let Some(bound) = report.value else {
        let failed: Vec<String> = report
            .failed_hypotheses()
            .map(|x| format!("{} ({})", x.name, x.detail))
            .collect();
        return Err(Error::Hypothesis(failed.join("; ")));
    };
    let law = reference_law(model, fp)?;
    let (e_x, e_z) = if exact {
        (
            expect_h(Target::Gibbs(model), h, Method::Exact)?,
            expect_h(Target::Product(&law), h, Method::Exact)?,
        )
    } else {
        let e_x = expect_h(
            Target::Gibbs(model),
            h,
            Method::Mcmc {
                samples: budget.samples,
                seed: budget.seed,
                burn: budget.burn,
            },
        )?;
        let e_z = match product_expectation_closed(&law, h) {
            Some(v) => Estimate::exact(v),
            None => expect_h(
                Target::Product(&law),
                h,
                Method::Iid {
                    samples: budget.samples,
                    seed: budget.seed.wrapping_add(1),
                },
            )?,
        };
        (e_x, e_z)
    };
    let gap = Estimate {
        value: (e_x.value - e_z.value).abs(),
        se: e_x.se.hypot(e_z.se),
    };
    Ok(VerificationRun {
        test_function: h.name(),
        report,
        bound,
        e_x,
        e_z,
        gap,
        exact_gap: exact.then_some(gap.value),
        verdict: judge(gap, exact, bound),
    })
}

pub const FLORENTINE_N: usize = 16;
pub const FLORENTINE_BETA1: f64 = -1.6339;
pub const FLORENTINE_BETA2: f64 = 0.0098;

/// The marriage network as an edge list.
pub const FLORENTINE_EDGES: &str = include_str!("../data/florentine.txt");

#[derive(Debug, Clone, PartialEq)]
pub struct FlorentineReport {
    pub beta1: f64,
    pub beta2: f64,
    /// `Φ(a) = phi_const + phi_slope · a`.
    pub phi_const: f64,
    pub phi_slope: f64,
    pub a_star: f64,
    /// `a*` to six decimals, as fed to the displayed expression.
    pub a_star_rounded: f64,
    /// The displayed numeric expression at the rounded root.
    pub displayed_value: f64,
    /// The same expression at the unrounded root.
    pub displayed_value_exact_root: f64,
    /// The two-star closed form at the unrounded root.
    pub proposition_value: f64,
    pub hypotheses_ok: bool,
    pub vertices: usize,
    pub edges: usize,
    pub isolated: usize,
    pub two_star_injections: u64,
}

/// Recomputes the Florentine numbers from the fitted coefficients and the
/// bundled edge list.
pub fn florentine_demo() -> Result<FlorentineReport> {
    let p = PhiPoly::new(vec![(FLORENTINE_BETA1, 1), (FLORENTINE_BETA2, 2)])?;
    let roots = solve_fixed_points(&p, DEFAULT_GRID, DEFAULT_TOL)?;
    let [fp] = roots.as_slice() else {
        return Err(Error::Rejected(format!("expected one root, found {}", roots.len())));
    };
    let a = fp.a_star;
    let rounded = (a * 1e6).round() / 1e6;
    let prop = bound_twostar(FLORENTINE_N, FLORENTINE_BETA1, FLORENTINE_BETA2, fp)?;
    let (g, _) = read_edge_list(FLORENTINE_EDGES)?;
    let isolated = (0..g.n()).filter(|&v| g.degree(v) == 0).count();
    Ok(FlorentineReport {
        beta1: FLORENTINE_BETA1,
        beta2: FLORENTINE_BETA2,
        phi_const: p.big_phi(0.0),
        phi_slope: p.big_phi(1.0) - p.big_phi(0.0),
        a_star: a,
        a_star_rounded: rounded,
        displayed_value: florentine_displayed(FLORENTINE_N, FLORENTINE_BETA2, rounded),
        displayed_value_exact_root: florentine_displayed(FLORENTINE_N, FLORENTINE_BETA2, a),
        proposition_value: prop.formula_value,
        hypotheses_ok: prop.hypotheses_ok(),
        vertices: g.n(),
        edges: g.num_edges(),
        isolated,
        two_star_injections: injection_count(&Motif::two_star(), &g)?,
    })
}

impl FlorentineReport {
    /// Human-readable summary.
    pub fn summary(&self) -> String {
        format!(
            "Phi(a) = {:.4} + {:.4} a\n\
             a* = {:.6} (unrounded {:.12})\n\
             displayed expression at a* = {:.6}: {:.7}\n\
             displayed expression at unrounded a*: {:.7}\n\
             two-star closed form: {:.6}  [differs from the displayed expression]\n\
             hypotheses: {}\n\
             network: {} vertices, {} edges, {} isolated, {} two-star injections\n",
            self.phi_const,
            self.phi_slope,
            self.a_star_rounded,
            self.a_star,
            self.a_star_rounded,
            self.displayed_value,
            self.displayed_value_exact_root,
            self.proposition_value,
            if self.hypotheses_ok { "pass" } else { "FAIL" },
            self.vertices,
            self.edges,
            self.isolated,
            self.two_star_injections,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ErgmModel, IsingModel};

    fn root(m: &ErgmModel) -> FixedPoint {
        let r = solve_fixed_points(&PhiPoly::from_model(m), DEFAULT_GRID, DEFAULT_TOL).unwrap();
        assert_eq!(r.len(), 1);
        r[0]
    }

    #[test]
    fn edge_density_under_er_is_a() {
        let law = ProductLaw::constant(10, 0.37).unwrap();
        let h = TestFunction::edge_density(10);
        let e = expect_h(Target::Product(&law), &h, Method::Exact).unwrap();
        assert!((e.value - 0.37).abs() < 1e-13);
        assert!((product_expectation_closed(&law, &h).unwrap() - 0.37).abs() < 1e-15);
    }

    #[test]
    fn triangle_density_under_er_matches_injection_count() {
        let a: f64 = 0.3;
        let law = ProductLaw::constant(10, a).unwrap();
        let h = TestFunction::hom_density(Motif::triangle(), 5).unwrap();
        let e = expect_h(Target::Product(&law), &h, Method::Exact).unwrap();
        let want = 60.0 * a.powi(3) / 125.0;
        assert!((e.value - want).abs() < 1e-15);
        assert!((product_expectation_closed(&law, &h).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn iid_agrees_with_exact_on_product_laws() {
        let law = ProductLaw::new(vec![0.1, 0.5, 0.8, 0.3, 0.6, 0.2]).unwrap();
        let h = TestFunction::hom_density(Motif::two_star(), 4).unwrap();
        let ex = expect_h(Target::Product(&law), &h, Method::Exact).unwrap();
        let mc = expect_h(Target::Product(&law), &h, Method::Iid { samples: 50_000, seed: 2 }).unwrap();
        assert!((ex.value - mc.value).abs() <= 3.0 * mc.half_width());
    }

    #[test]
    fn mcmc_and_iid_agree_for_edge_only() {
        let m = ErgmModel::edge_only(6, -0.8).unwrap();
        let law = ergm_reference_law(&m, &root(&m), REFERENCE_TOL).unwrap();
        let h = TestFunction::edge_density(15);
        let a = expect_h(Target::Gibbs(&m), &h, Method::Mcmc { samples: 6000, seed: 5, burn: None }).unwrap();
        let b = expect_h(Target::Product(&law), &h, Method::Iid { samples: 6000, seed: 6 }).unwrap();
        let joint = a.se.hypot(b.se) * crate::stats::Z99;
        assert!((a.value - b.value).abs() <= joint, "{a:?} {b:?}");
    }

    #[test]
    fn iid_is_refused_for_gibbs_targets() {
        let m = ErgmModel::edge_only(4, 0.0).unwrap();
        let h = TestFunction::edge_density(6);
        assert!(expect_h(Target::Gibbs(&m), &h, Method::Iid { samples: 10, seed: 0 }).is_err());
    }

    #[test]
    fn verdict_rules() {
        let e = |v, se| Estimate { value: v, se };
        assert_eq!(judge(e(0.1, 0.0), true, 0.1), Verdict::BoundHolds);
        assert_eq!(judge(e(0.1 + 1e-15, 0.0), true, 0.1), Verdict::BoundViolatedWithinCi);
        assert_eq!(judge(e(0.05, 0.001), false, 0.1), Verdict::BoundHolds);
        assert_eq!(judge(e(0.11, 0.01), false, 0.1), Verdict::Inconclusive);
        assert_eq!(judge(e(0.5, 0.01), false, 0.1), Verdict::BoundViolatedWithinCi);
    }

    #[test]
    fn zero_beta_gap_is_zero_and_bound_is_zero() {
        let m = Model::Ergm(ErgmModel::two_star(4, 0.0, 0.0).unwrap());
        let Model::Ergm(inner) = &m else { unreachable!() };
        let fp = root(inner);
        let h = TestFunction::edge_density(6);
        let run = verify_bound(&m, Some(&fp), &h, Theorem::NegBetas, &Budget::new(1000, 0)).unwrap();
        assert_eq!(run.bound, 0.0);
        assert!(run.exact_gap.unwrap() < 1e-15);
        assert_eq!(run.verdict, Verdict::BoundHolds);
    }

    #[test]
    fn rigorous_pnorm_route_holds_on_small_triangle_model() {
        let inner = ErgmModel::triangle(4, -0.5, 0.1).unwrap();
        let fp = root(&inner);
        let m = Model::Ergm(inner);
        let h = TestFunction::hom_density(Motif::triangle(), 4).unwrap();
        let run = verify_bound(&m, Some(&fp), &h, Theorem::KeyPnorm, &Budget::new(1000, 0)).unwrap();
        assert_eq!(run.verdict, Verdict::BoundHolds, "{run:?}");
    }

    #[test]
    fn hypothesis_failure_propagates() {
        let inner = ErgmModel::two_star(4, 0.0, 1.5).unwrap();
        let fp = FixedPoint::at(&PhiPoly::from_model(&inner), 0.5);
        let m = Model::Ergm(inner);
        let h = TestFunction::edge_density(6);
        let r = verify_bound(&m, Some(&fp), &h, Theorem::TwoStar, &Budget::new(1000, 0));
        assert!(matches!(r, Err(Error::Hypothesis(_)) | Err(Error::Rejected(_))));
    }

    #[test]
    fn ising_key1_uses_the_symmetric_reference() {
        let m = Model::Ising(IsingModel::cycle(6, 0.5).unwrap());
        let h = TestFunction::edge_density(6);
        let run = verify_bound(&m, None, &h, Theorem::Key1, &Budget::new(1000, 0)).unwrap();
        assert!(run.exact_gap.unwrap() < 1e-12);
        assert_eq!(run.verdict, Verdict::BoundHolds);
    }

    #[test]
    fn florentine_numbers() {
        let r = florentine_demo().unwrap();
        assert!((r.a_star_rounded - 0.036743).abs() < 1e-12);
        assert!((r.displayed_value - 0.0817595).abs() < 1e-6);
        assert!((r.proposition_value - 0.0422).abs() < 5e-4);
        assert!((r.phi_slope - 0.0196).abs() < 1e-12);
        assert_eq!((r.vertices, r.edges, r.isolated), (16, 20, 1));
    }

    #[test]
    fn default_burn_for_graphs_and_sites() {
        assert_eq!(default_burn(45), burn_in_steps(10));
        assert_eq!(default_burn(7), (70.0 * 7f64.ln()).ceil() as u64);
    }
}
