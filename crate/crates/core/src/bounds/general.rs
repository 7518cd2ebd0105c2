use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::{constants, BoundReport, Hypothesis, Theorem};
use crate::error::{Error, Result};
use crate::graph::Config;
use crate::models::{logistic, GibbsModel, IsingModel, ProductLaw};
use crate::stats::{exact_product_expectation, mc_mean, substream, Estimate, BLOCK};

/// How an expectation under a product law is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

/// Matrix norm induced by a vector `p`-norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PNorm {
    /// Maximum column sum.
    One,
    Two,
    /// Maximum row sum.
    Inf,
}

impl PNorm {
    /// `q` with `1/p + 1/q = 1`.
    pub fn dual(self) -> PNorm {
        match self {
            PNorm::One => PNorm::Inf,
            PNorm::Two => PNorm::Two,
            PNorm::Inf => PNorm::One,
        }
    }

    pub fn vector_norm(self, v: &[f64]) -> f64 {
        match self {
            PNorm::One => v.iter().map(|x| x.abs()).sum(),
            PNorm::Two => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            PNorm::Inf => v.iter().map(|x| x.abs()).fold(0.0, f64::max),
        }
    }
}

impl fmt::Display for PNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PNorm::One => "1",
            PNorm::Two => "2",
            PNorm::Inf => "inf",
        })
    }
}

impl FromStr for PNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(PNorm::One),
            "2" => Ok(PNorm::Two),
            "inf" | "∞" => Ok(PNorm::Inf),
            _ => Err(Error::Parse(format!("p must be 1, 2 or inf, got {s:?}"))),
        }
    }
}

/// Induced matrix norm; the 2-norm comes from power iteration on `RᵀR`.
pub fn matrix_norm(r: &DMatrix<f64>, p: PNorm) -> f64 {
    match p {
        PNorm::One => (0..r.ncols())
            .map(|j| r.column(j).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max),
        PNorm::Inf => (0..r.nrows())
            .map(|i| r.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max),
        PNorm::Two => {
            let m = r.transpose() * r;
            let k = m.ncols();
            if k == 0 {
                return 0.0;
            }
            let mut v = DVector::from_element(k, 1.0 / (k as f64).sqrt());
            let mut lambda = 0.0;
            for _ in 0..10_000 {
                let w = &m * &v;
                let norm = w.norm();
                if norm == 0.0 {
                    return 0.0;
                }
                let next = v.dot(&w);
                v = w / norm;
                if (next - lambda).abs() <= 1e-10 * next.abs().max(1e-300) {
                    lambda = next;
                    break;
                }
                lambda = next;
            }
            lambda.max(0.0).sqrt()
        }
    }
}

/// `Δ_s L(y)` for every coordinate.
fn delta_vector<M: GibbsModel + ?Sized>(model: &M, y: &Config) -> Vec<f64> {
    (0..model.dim()).map(|s| model.delta_l(y, s)).collect()
}

/// Per-coordinate means of `f(y)` over `samples` draws of `Y`.
fn mc_vector_mean<F>(law: &ProductLaw, samples: usize, seed: u64, f: F) -> Vec<f64>
where
    F: Fn(&Config) -> Vec<f64> + Sync,
{
    let dim = law.p().len();
    let blocks = samples.div_ceil(BLOCK);
    let parts: Vec<Vec<f64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = substream(seed, b as u64);
            let mut acc = vec![0.0; dim];
            for _ in 0..BLOCK.min(samples - b * BLOCK) {
                let y = law.sample(&mut rng);
                for (a, v) in acc.iter_mut().zip(f(&y)) {
                    *a += v;
                }
            }
            acc
        })
        .collect();
    let mut out = vec![0.0; dim];
    for p in &parts {
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
    out.iter().map(|v| v / samples as f64).collect()
}

/// `(Σ_s E|Δ_s L(Y) - E Δ_s L(Y)|, E Δ_s L(Y) for each s)`.
///
/// The Monte Carlo route estimates the centring means from one set of
/// substreams and the absolute deviations from a disjoint set.
pub fn mean_abs_deviation_delta_l<M: GibbsModel + ?Sized>(
    model: &M,
    law: &ProductLaw,
    est: Estimator,
) -> Result<(Estimate, Vec<f64>)> {
    let dim = model.dim();
    if law.p().len() != dim {
        return Err(Error::Domain("model and law have different dimensions".into()));
    }
    match est {
        Estimator::Exact => {
            let means: Vec<f64> = (0..dim)
                .map(|s| exact_product_expectation(law, |y| model.delta_l(y, s)))
                .collect::<Result<_>>()?;
            let mad = exact_product_expectation(law, |y| {
                delta_vector(model, y)
                    .iter()
                    .zip(&means)
                    .map(|(d, m)| (d - m).abs())
                    .sum()
            })?;
            Ok((Estimate::exact(mad), means))
        }
        Estimator::MonteCarlo { samples, seed } => {
            let means = mc_vector_mean(law, samples, seed, |y| delta_vector(model, y));
            let mad = mc_mean(samples, seed ^ 0x5bd1_e995_u64.rotate_left(17), |rng| {
                let y = law.sample(rng);
                delta_vector(model, &y)
                    .iter()
                    .zip(&means)
                    .map(|(d, m)| (d - m).abs())
                    .sum()
            })?;
            Ok((mad, means))
        }
    }
}

/// The general contraction bound `(4Nρ)⁻¹ Σ_s E|Δ_s L(Y) - E Δ_s L(Y)|`,
/// together with the residual of `p_s = (1 + tanh(½ E Δ_s L(Y)))/2`.
pub fn bound_key1<M: GibbsModel + ?Sized>(
    model: &M,
    law: &ProductLaw,
    rho: f64,
    est: Estimator,
) -> Result<BoundReport> {
    let dim = model.dim();
    let (mad, means) = mean_abs_deviation_delta_l(model, law, est)?;
    let residual = means
        .iter()
        .zip(law.p())
        .map(|(m, p)| (logistic(*m) - p).abs())
        .fold(0.0, f64::max);
    let value = mad.value / (4.0 * dim as f64 * rho);
    let exact = matches!(est, Estimator::Exact);
    let fp_check = if exact {
        Hypothesis::required(
            "mean_field_equation",
            residual <= 1e-9,
            format!("max_s |p_s - q(E Δ_s L(Y))| = {residual:.3e}"),
        )
    } else {
        Hypothesis::informational(
            "mean_field_equation",
            residual <= 1e-2,
            format!("Monte Carlo residual {residual:.3e}"),
        )
    };
    let hyps = vec![
        Hypothesis::required("rho_in_unit_interval", rho > 0.0 && rho <= 1.0, format!("ρ = {rho}")),
        fp_check,
    ];
    let c = constants([
        ("N", dim as f64),
        ("rho", rho),
        ("mad_sum", mad.value),
        ("mad_sum_se", mad.se),
        ("value_se", mad.se / (4.0 * dim as f64 * rho)),
        ("mean_field_residual", residual),
    ]);
    Ok(BoundReport::new(
        Theorem::Key1,
        value,
        hyps,
        c,
        "per unit ‖Δh‖",
    ))
}

/// `β√r / (1 - βr/N)`, with both readings of the temperature regime recorded.
pub fn bound_ising(m: &IsingModel) -> BoundReport {
    let beta = m.beta();
    let nf = m.n() as f64;
    let r = m.max_degree() as f64;
    let denom = 1.0 - beta * r / nf;
    let value = beta * r.sqrt() / denom;
    let rho = (1.0 - r * (beta / nf).tanh()) / nf;
    let rho_influence = (1.0 - r * (2.0 * beta / nf).tanh()) / nf;
    let hyps = vec![
        Hypothesis::required("beta_nonnegative", beta >= 0.0, format!("β = {beta}")),
        Hypothesis::required(
            "denominator_positive",
            denom > 0.0,
            format!("1 - βr/N = {denom} (β < N/r)"),
        ),
        Hypothesis::informational(
            "stated_regime",
            beta > 0.0 && beta < r / nf,
            format!("0 < β < r/N with r/N = {}", r / nf),
        ),
        Hypothesis::informational(
            "rho_positive",
            rho > 0.0,
            format!("ρ = (1 - r tanh(β/N))/N = {rho}"),
        ),
    ];
    let c = constants([
        ("beta", beta),
        ("N", nf),
        ("r", r),
        ("beta_r_over_N", beta * r / nf),
        ("rho", rho),
        ("rho_lower", denom / nf),
        ("rho_influence", rho_influence),
    ]);
    BoundReport::new(
        Theorem::IsingCwbd,
        if beta == 0.0 { 0.0 } else { value },
        hyps,
        c,
        "per unit ‖Δh‖; uniform reference law p ≡ ½",
    )
}

/// `E‖v(Y)‖_p` with `v_s(y) = |q_X(y^{(s,1)} | y) - p_s|`.
pub fn expected_v_norm<M: GibbsModel + ?Sized>(
    model: &M,
    law: &ProductLaw,
    p: PNorm,
    est: Estimator,
) -> Result<Estimate> {
    if law.p().len() != model.dim() {
        return Err(Error::Domain("model and law have different dimensions".into()));
    }
    let v = |y: &Config| -> f64 {
        let vs: Vec<f64> = (0..model.dim())
            .map(|s| (model.conditional(y, s) - law.p()[s]).abs())
            .collect();
        p.vector_norm(&vs)
    };
    match est {
        Estimator::Exact => exact_product_expectation(law, v).map(Estimate::exact),
        Estimator::MonteCarlo { samples, seed } => mc_mean(samples, seed, |rng| v(&law.sample(rng))),
    }
}

/// `ε⁻¹ ‖c‖_q E‖v(Y)‖_p` with `ε = 1 - ‖R‖_p`.
pub fn bound_general_pnorm(
    r: &DMatrix<f64>,
    p: PNorm,
    c: &[f64],
    ev: Estimate,
) -> Result<BoundReport> {
    if r.nrows() != r.ncols() || r.nrows() != c.len() {
        return Err(Error::Domain(format!(
            "R is {}×{} but c has {} entries",
            r.nrows(),
            r.ncols(),
            c.len()
        )));
    }
    let norm = matrix_norm(r, p);
    let eps = 1.0 - norm;
    let cq = p.dual().vector_norm(c);
    let value = cq * ev.value / eps;
    let hyps = vec![
        Hypothesis::required("norm_below_one", norm < 1.0, format!("‖R‖_{p} = {norm}")),
        Hypothesis::required(
            "nonnegative_entries",
            r.iter().all(|x| *x >= 0.0),
            "R ≥ 0 entrywise".to_string(),
        ),
    ];
    let k = constants([
        ("R_norm", norm),
        ("eps", eps),
        ("c_norm_q", cq),
        ("E_v_norm", ev.value),
        ("E_v_norm_se", ev.se),
        ("value_se", cq * ev.se / eps),
    ]);
    Ok(BoundReport::new(
        Theorem::KeyPnorm,
        value,
        hyps,
        k,
        format!("absolute (‖c‖_q included); p = {p}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ErgmModel;

    #[test]
    fn ising_examples() {
        let zero = IsingModel::complete(6, 0.0).unwrap();
        assert_eq!(bound_ising(&zero).value, Some(0.0));
        let m = IsingModel::complete(4, 0.5).unwrap();
        let r = bound_ising(&m);
        assert!((r.value.unwrap() - 0.5 * 3f64.sqrt() / 0.625).abs() < 1e-12);
        assert!((r.constant("rho").unwrap() - (1.0 - 3.0 * (0.125f64).tanh()) / 4.0).abs() < 1e-15);
        let hot = IsingModel::complete(4, 1.5).unwrap();
        assert!(!bound_ising(&hot).hypotheses_ok());
        // Curie–Weiss: value ≈ β√N/(1-β) for large N.
        let n = 400;
        let cw = IsingModel::complete(n, 0.3).unwrap();
        let v = bound_ising(&cw).value.unwrap();
        let approx = 0.3 * (n as f64).sqrt() / 0.7;
        assert!((v / approx - 1.0).abs() < 0.01);
    }

    #[test]
    fn cwbd_dominates_the_exact_key1_value() {
        let m = IsingModel::complete(4, 0.5).unwrap();
        let law = ProductLaw::uniform(4);
        let r = m.max_degree() as f64;
        let rho = (1.0 - 0.5 * r / 4.0) / 4.0;
        let k = bound_key1(&m, &law, rho, Estimator::Exact).unwrap();
        assert!(k.hypotheses_ok(), "{:?}", k.hypotheses);
        assert!(k.value.unwrap() <= bound_ising(&m).value.unwrap());
        let mc = bound_key1(&m, &law, rho, Estimator::MonteCarlo { samples: 20_000, seed: 1 }).unwrap();
        let se = mc.constant("value_se").unwrap();
        assert!((mc.formula_value - k.formula_value).abs() < 4.0 * se + 1e-12);
    }

    #[test]
    fn matrix_norms() {
        let r = DMatrix::from_row_slice(2, 2, &[0.0, 0.3, 0.1, 0.0]);
        assert!((matrix_norm(&r, PNorm::One) - 0.3).abs() < 1e-15);
        assert!((matrix_norm(&r, PNorm::Inf) - 0.3).abs() < 1e-15);
        assert!((matrix_norm(&r, PNorm::Two) - 0.3).abs() < 1e-8);
        let s = DMatrix::from_row_slice(3, 3, &[0.0, 0.2, 0.1, 0.2, 0.0, 0.3, 0.1, 0.3, 0.0]);
        assert!((matrix_norm(&s, PNorm::One) - matrix_norm(&s, PNorm::Inf)).abs() < 1e-15);
        let eig = s.clone().symmetric_eigenvalues().iter().map(|x| x.abs()).fold(0.0, f64::max);
        assert!((matrix_norm(&s, PNorm::Two) - eig).abs() < 1e-8);
        assert_eq!("inf".parse::<PNorm>().unwrap().dual(), PNorm::One);
        assert!("3".parse::<PNorm>().is_err());
    }

    #[test]
    fn independent_model_gives_zero() {
        let m = ErgmModel::edge_only(4, 0.4).unwrap();
        let p = logistic(0.8);
        let law = ProductLaw::constant(6, p).unwrap();
        let ev = expected_v_norm(&m, &law, PNorm::One, Estimator::Exact).unwrap();
        assert!(ev.value < 1e-15);
        let r = DMatrix::zeros(6, 6);
        let b = bound_general_pnorm(&r, PNorm::One, &[1.0 / 6.0; 6], ev).unwrap();
        assert_eq!(b.constant("eps"), Some(1.0));
        assert!(b.value.unwrap() < 1e-15);
        assert!(bound_general_pnorm(&r, PNorm::One, &[1.0; 5], ev).is_err());
    }
}
