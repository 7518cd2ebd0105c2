use super::variance::{term_variances, VarMode};
use super::{constants, BoundReport, Hypothesis, Theorem};
use crate::error::{domain, Result};
use crate::graph::num_pairs;
use crate::meanfield::{FixedPoint, PhiPoly, C2};
use crate::models::ErgmModel;

/// Residual allowed in `φ(a*) = a*` before a report flags the fixed point.
const FP_TOL: f64 = 1e-9;

fn fixed_point_hypothesis(p: &PhiPoly, fp: &FixedPoint) -> Hypothesis {
    let r = (p.phi_unchecked(fp.a_star.clamp(0.0, 1.0)) - fp.a_star).abs();
    Hypothesis::required(
        "fixed_point",
        (0.0..=1.0).contains(&fp.a_star) && r <= FP_TOL,
        format!("|φ(a*) - a*| = {r:.3e} at a* = {}", fp.a_star),
    )
}

/// `(α₁, α₂, A*)` at the fixed point, from the analytic derivatives of `Φ`.
pub fn alphas(p: &PhiPoly, a_star: f64, n: usize) -> (f64, f64, f64) {
    alphas_from(
        a_star,
        n,
        p.big_phi(a_star),
        p.big_phi_prime(a_star),
        p.big_phi_prime(1.0),
        p.big_phi_second(1.0),
        p.phi_prime(a_star),
    )
}

fn alphas_from(
    a: f64,
    n: usize,
    phi_a: f64,
    dphi_a: f64,
    dphi_1: f64,
    d2phi_1: f64,
    small_dphi_a: f64,
) -> (f64, f64, f64) {
    let big_a = a.max(1.0 - a);
    let sech2 = 1.0 / phi_a.cosh().powi(2);
    let a1 = 0.5 * (dphi_a + big_a * d2phi_1);
    let a2 = small_dphi_a
        + 0.5
            * (C2 * (big_a + 1.0 / n as f64) * dphi_1 * (dphi_a + big_a * dphi_1)
                + big_a * d2phi_1 * sech2);
    (a1, a2, big_a)
}

/// The same constants with every derivative replaced by a central difference.
fn alphas_fd(p: &PhiPoly, a: f64, n: usize) -> (f64, f64, f64) {
    let h = 1e-4;
    let d = |x: f64| (p.big_phi(x + h) - p.big_phi(x - h)) / (2.0 * h);
    let d2 = |x: f64| (p.big_phi(x + h) - 2.0 * p.big_phi(x) + p.big_phi(x - h)) / (h * h);
    let small = |x: f64| 0.5 * (1.0 + p.big_phi(x).tanh());
    let small_d = (small(a + h) - small(a - h)) / (2.0 * h);
    alphas_from(a, n, p.big_phi(a), d(a), d(1.0), d2(1.0), small_d)
}

fn variance_sum(
    m: &ErgmModel,
    a: f64,
    mode: VarMode,
    weight: impl Fn(f64) -> f64,
    consts: &mut std::collections::BTreeMap<String, f64>,
) -> Result<f64> {
    let vars = term_variances(m, a, mode)?;
    let mut sum = 0.0;
    for (l, ((_, b), v)) in m.terms().iter().zip(&vars).enumerate().skip(1) {
        consts.insert(format!("var_dt_{}", l + 1), v.value);
        if v.se > 0.0 {
            consts.insert(format!("var_dt_{}_se", l + 1), v.se);
        }
        sum += weight(*b) * v.value.sqrt();
    }
    Ok(sum)
}

/// Bound for positive higher-order coefficients, with `γ = 1 - min{α₁, α₂}`.
pub fn bound_smallbetas(m: &ErgmModel, fp: &FixedPoint) -> Result<BoundReport> {
    bound_smallbetas_with(m, fp, VarMode::Auto)
}

pub fn bound_smallbetas_with(m: &ErgmModel, fp: &FixedPoint, mode: VarMode) -> Result<BoundReport> {
    let p = PhiPoly::from_model(m);
    let n = m.n();
    let a = fp.a_star;
    let (a1, a2, big_a) = alphas(&p, a, n);
    let gamma = 1.0 - a1.min(a2);
    let (f1, f2, _) = alphas_fd(&p, a, n);
    let gamma_fd = 1.0 - f1.min(f2);
    let mut c = constants([
        ("n", n as f64),
        ("a_star", a),
        ("A_star", big_a),
        ("alpha1", a1),
        ("alpha2", a2),
        ("gamma", gamma),
        ("gamma_fd", gamma_fd),
        ("C2", C2),
        ("phi_prime_a_star", p.phi_prime(a)),
        ("Phi_prime_1", p.big_phi_prime(1.0)),
        ("Phi_second_1", p.big_phi_second(1.0)),
    ]);
    let positive = m.terms().iter().skip(1).all(|t| t.1 > 0.0);
    let hyps = vec![
        Hypothesis::required(
            "positive_betas",
            positive,
            "β_ℓ > 0 for every ℓ ≥ 2".to_string(),
        ),
        fixed_point_hypothesis(&p, fp),
        Hypothesis::required("gamma_positive", gamma > 0.0, format!("γ = {gamma}")),
        Hypothesis::required(
            "dual_path",
            (gamma - gamma_fd).abs() <= 1e-6 * gamma.abs().max(1.0),
            format!("γ analytic {gamma} vs finite-difference {gamma_fd}"),
        ),
        Hypothesis::informational(
            "phi_prime_below_one",
            p.phi_prime(a) < 1.0,
            format!("φ'(a*) = {}", p.phi_prime(a)),
        ),
    ];
    let sum = variance_sum(m, a, mode, |b| b, &mut c)?;
    let value = num_pairs(n) as f64 / (4.0 * gamma) * sum;
    Ok(BoundReport::new(
        Theorem::SmallBetas,
        if sum == 0.0 { 0.0 } else { value },
        hyps,
        c,
        "per unit ‖Δh‖; Var(Δ_12 t_ℓ(Z)) with t_ℓ normalized by n(n-1)...(n-v_ℓ+3)",
    ))
}

/// Bound under `½|Φ|'(1) < 1`, any signs.
pub fn bound_negbetas(m: &ErgmModel, fp: &FixedPoint) -> Result<BoundReport> {
    bound_negbetas_with(m, fp, VarMode::Auto)
}

pub fn bound_negbetas_with(m: &ErgmModel, fp: &FixedPoint, mode: VarMode) -> Result<BoundReport> {
    let p = PhiPoly::from_model(m);
    let n = m.n();
    let a = fp.a_star;
    let abs1 = p.abs_phi_prime(1.0);
    let contraction = 1.0 - 0.5 * abs1;
    let mut c = constants([
        ("n", n as f64),
        ("a_star", a),
        ("abs_Phi_prime_1", abs1),
        ("contraction", contraction),
    ]);
    let hyps = vec![
        Hypothesis::required("abs_phi_prime_below_two", abs1 < 2.0, format!("|Φ|'(1) = {abs1}")),
        fixed_point_hypothesis(&p, fp),
    ];
    let sum = variance_sum(m, a, mode, f64::abs, &mut c)?;
    let value = num_pairs(n) as f64 / (4.0 * contraction) * sum;
    Ok(BoundReport::new(
        Theorem::NegBetas,
        if sum == 0.0 { 0.0 } else { value },
        hyps,
        c,
        "per unit ‖Δh‖; Var(Δ_12 t_ℓ(Z)) with t_ℓ normalized by n(n-1)...(n-v_ℓ+3)",
    ))
}

fn two_term_fp(n: usize, beta1: f64, beta2: f64, e2: usize, fp: &FixedPoint) -> Result<Hypothesis> {
    if n < 3 {
        return domain("the two-term closed forms need n ≥ 3");
    }
    let p = PhiPoly::new(vec![(beta1, 1), (beta2, e2)])?;
    Ok(fixed_point_hypothesis(&p, fp))
}

/// Closed-form bound for edge + two-star, valid for `|β₂| < 1`.
pub fn bound_twostar(n: usize, beta1: f64, beta2: f64, fp: &FixedPoint) -> Result<BoundReport> {
    let fp_h = two_term_fp(n, beta1, beta2, 2, fp)?;
    let a = fp.a_star;
    let b = beta2.abs();
    let nf = n as f64;
    let value =
        num_pairs(n) as f64 / (4.0 * (1.0 - b)) * (8.0 * a * (1.0 - a)).sqrt() * b / (nf - 2.0).sqrt();
    let theorem_path =
        num_pairs(n) as f64 / (4.0 * (1.0 - b)) * b * (8.0 * (nf - 2.0) * a * (1.0 - a)).sqrt() / nf;
    let c = constants([
        ("n", nf),
        ("a_star", a),
        ("beta2", beta2),
        ("theorem_path_value", theorem_path),
        ("displayed_value", florentine_displayed(n, beta2, a)),
    ]);
    let hyps = vec![
        Hypothesis::required("abs_beta2_below_one", b < 1.0, format!("|β₂| = {b}")),
        fp_h,
    ];
    Ok(BoundReport::new(
        Theorem::TwoStar,
        value,
        hyps,
        c,
        "per unit ‖Δh‖; unnormalized Var(Δ_ij t) = 8(n-2)a*(1-a*) with 1/√(n-2)",
    ))
}

/// Closed-form bound for edge + triangle, valid for `|β₂| < 1/3`.
pub fn bound_triangle(n: usize, beta1: f64, beta2: f64, fp: &FixedPoint) -> Result<BoundReport> {
    let fp_h = two_term_fp(n, beta1, beta2, 3, fp)?;
    let a = fp.a_star;
    let b = beta2.abs();
    let nf = n as f64;
    let value = num_pairs(n) as f64 / (4.0 * (1.0 - 3.0 * b)) * 6.0 * a * (1.0 - a * a).sqrt() * b
        / (nf - 2.0).sqrt();
    let theorem_path = num_pairs(n) as f64 / (4.0 * (1.0 - 3.0 * b))
        * b
        * (36.0 * (nf - 2.0) * a * a * (1.0 - a * a)).sqrt()
        / nf;
    let c = constants([
        ("n", nf),
        ("a_star", a),
        ("beta2", beta2),
        ("theorem_path_value", theorem_path),
    ]);
    let hyps = vec![
        Hypothesis::required("abs_beta2_below_one_third", 3.0 * b < 1.0, format!("|β₂| = {b}")),
        fp_h,
    ];
    Ok(BoundReport::new(
        Theorem::Triangle,
        value,
        hyps,
        c,
        "per unit ‖Δh‖; unnormalized Var(Δ_ij t) = 36(n-2)a*²(1-a*²) with 1/√(n-2)",
    ))
}

/// `C(n,2) a* √(8|β₂|(1-a*)) / (4(1-|β₂|)√(n-2))`: the numeric expression
/// printed for the Florentine example, which places `a*` and `β₂` on the
/// opposite sides of the square root from the two-star closed form.
pub fn florentine_displayed(n: usize, beta2: f64, a_star: f64) -> f64 {
    let b = beta2.abs();
    num_pairs(n) as f64 * a_star * (8.0 * b * (1.0 - a_star)).sqrt()
        / (4.0 * (1.0 - b) * (n as f64 - 2.0).sqrt())
}

/// `½[Φ'(a*) + εΦ''(1)] · min{1, sech²(Φ(a*)) + C₂(ε + 1/n)Φ'(1)}`.
pub fn hightemp_f(p: &PhiPoly, a_star: f64, eps: f64, n: usize) -> f64 {
    let lhs = 0.5 * (p.big_phi_prime(a_star) + eps * p.big_phi_second(1.0));
    let rhs = (p.sech2_phi(a_star) + C2 * (eps + 1.0 / n as f64) * p.big_phi_prime(1.0)).min(1.0);
    lhs * rhs
}

#[derive(Debug, Clone, PartialEq)]
pub struct HighTempReport {
    /// Exactly one root, and it has `φ'(a*) < 1`.
    pub ok: bool,
    pub roots: usize,
    pub a_star: Option<f64>,
    pub phi_prime: Option<f64>,
    /// Largest `ε ∈ [0,1]` with `hightemp_f < 1`, found by bisection.
    pub eps_max: Option<f64>,
    pub detail: String,
}

/// Checks the unique-stable-root hypothesis and measures the ε-region.
pub fn check_hightemp(p: &PhiPoly, roots: &[FixedPoint], n: usize) -> HighTempReport {
    let ok = roots.len() == 1 && roots[0].stable;
    let (a_star, phi_prime, eps_max) = match roots {
        [r] => {
            let f = |e: f64| hightemp_f(p, r.a_star, e, n);
            let eps = if f(1.0) < 1.0 {
                Some(1.0)
            } else if f(0.0) >= 1.0 {
                None
            } else {
                let (mut lo, mut hi) = (0.0, 1.0);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if f(mid) < 1.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Some(lo)
            };
            (Some(r.a_star), Some(r.phi_prime), eps)
        }
        _ => (None, None, None),
    };
    let detail = match roots {
        [] => "no root found".to_string(),
        [r] if r.stable => format!("unique root a* = {} with φ'(a*) = {}", r.a_star, r.phi_prime),
        [r] => format!("unique root a* = {} is not stable (φ'(a*) = {})", r.a_star, r.phi_prime),
        rs => format!("{} roots of φ(a) = a", rs.len()),
    };
    HighTempReport {
        ok,
        roots: roots.len(),
        a_star,
        phi_prime,
        eps_max,
        detail,
    }
}
