//! Mean-field functions of an ERGM and the fixed points of `φ(a) = a`.
//!
//! With coefficients `(β_ℓ, e_ℓ)`:
//! `Φ(a) = Σ β_ℓ e_ℓ a^{e_ℓ-1}`, `|Φ|(a) = Σ |β_ℓ| e_ℓ a^{e_ℓ-1}` and
//! `φ(a) = (1 + tanh Φ(a)) / 2`.

use crate::error::{domain, Error, Result};
use crate::graph::falling;
use crate::models::{ErgmModel, IsingModel, ProductLaw};

/// `C₂ = 4 / (3√3)`, the maximum of `|d/dx sech² x|`.
pub const C2: f64 = 0.769_800_358_919_501;

/// Default number of scan intervals in [`solve_fixed_points`].
pub const DEFAULT_GRID: usize = 4096;
pub const DEFAULT_TOL: f64 = 1e-12;

/// `|φ'(a*) - 1|` below which a root is reported as marginal.
const MARGINAL_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct PhiPoly {
    coeffs: Vec<(f64, usize)>,
}

#[inline]
fn sech2(x: f64) -> f64 {
    let c = x.cosh();
    if c.is_finite() {
        1.0 / (c * c)
    } else {
        0.0
    }
}

impl PhiPoly {
    /// Coefficients `(β_ℓ, e_ℓ)`; every `e_ℓ ≥ 1`.
    pub fn new(coeffs: Vec<(f64, usize)>) -> Result<Self> {
        if coeffs.iter().any(|&(b, e)| e == 0 || !b.is_finite()) {
            return domain("Φ needs finite coefficients and edge counts e ≥ 1");
        }
        Ok(PhiPoly { coeffs })
    }

    pub fn from_model(m: &ErgmModel) -> Self {
        PhiPoly {
            coeffs: m.coefficients(),
        }
    }

    pub fn coefficients(&self) -> &[(f64, usize)] {
        &self.coeffs
    }

    /// `Σ w(β) e (e-1)...(e-k) a^{e-1-k}`, the `k`-th derivative of the weighted sum.
    fn eval(&self, a: f64, k: usize, weight: impl Fn(f64) -> f64) -> f64 {
        self.coeffs
            .iter()
            .filter(|&&(_, e)| e > k)
            .map(|&(b, e)| {
                let c: f64 = (0..=k).map(|i| (e - i) as f64).product();
                weight(b) * c * a.powi((e - 1 - k) as i32)
            })
            .fold(0.0, |acc, t| acc + t)
    }

    /// `Φ(a)`.
    pub fn big_phi(&self, a: f64) -> f64 {
        self.eval(a, 0, |b| b)
    }

    /// `Φ'(a)`.
    pub fn big_phi_prime(&self, a: f64) -> f64 {
        self.eval(a, 1, |b| b)
    }

    /// `Φ''(a)`.
    pub fn big_phi_second(&self, a: f64) -> f64 {
        self.eval(a, 2, |b| b)
    }

    /// `|Φ|(a)`.
    pub fn abs_phi(&self, a: f64) -> f64 {
        self.eval(a, 0, f64::abs)
    }

    /// `|Φ|'(a)`.
    pub fn abs_phi_prime(&self, a: f64) -> f64 {
        self.eval(a, 1, f64::abs)
    }

    /// `φ(a)` for `a ∈ [0,1]`.
    pub fn phi(&self, a: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&a) {
            return domain(format!("φ is defined on [0,1], got {a}"));
        }
        Ok(self.phi_unchecked(a))
    }

    pub(crate) fn phi_unchecked(&self, a: f64) -> f64 {
        0.5 * (1.0 + self.big_phi(a).tanh())
    }

    /// `φ'(a) = ½ sech²(Φ(a)) Φ'(a)`.
    pub fn phi_prime(&self, a: f64) -> f64 {
        0.5 * sech2(self.big_phi(a)) * self.big_phi_prime(a)
    }

    /// `sech²(Φ(a))`.
    pub fn sech2_phi(&self, a: f64) -> f64 {
        sech2(self.big_phi(a))
    }
}

/// A root of `φ(a) = a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub a_star: f64,
    pub phi_prime: f64,
    /// `φ'(a*) < 1` and not marginal.
    pub stable: bool,
    /// No other root was found.
    pub unique: bool,
    /// `φ'(a*) = 1` up to numerical tolerance.
    pub marginal: bool,
}

impl FixedPoint {
    /// `A* = max{a*, 1 - a*}`.
    pub fn a_big(&self) -> f64 {
        self.a_star.max(1.0 - self.a_star)
    }

    pub fn at(p: &PhiPoly, a_star: f64) -> Self {
        let d = p.phi_prime(a_star);
        let marginal = (d - 1.0).abs() <= MARGINAL_TOL;
        FixedPoint {
            a_star,
            phi_prime: d,
            stable: d < 1.0 && !marginal,
            unique: true,
            marginal,
        }
    }
}

/// Bisection on a bracketing interval until `|g| ≤ tol` or the interval collapses.
fn bisect(g: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut glo = g(lo);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm.abs() <= tol && hi - lo <= 1e-12 {
            return mid;
        }
        if gm == 0.0 {
            return mid;
        }
        if (gm > 0.0) == (glo > 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * mid.abs().max(1e-300) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section minimization of `|g|` on `[lo, hi]`.
fn min_abs(g: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    for _ in 0..200 {
        if g(c).abs() < g(d).abs() {
            hi = d;
        } else {
            lo = c;
        }
        c = hi - r * (hi - lo);
        d = lo + r * (hi - lo);
    }
    0.5 * (lo + hi)
}

/// All roots of `g` on `[0,1]` found by a uniform scan with `grid` intervals,
/// refined by bisection, plus tangential roots where `|g|` has a local
/// minimum within `tol` of zero.
pub(crate) fn scan_roots(g: impl Fn(f64) -> f64, grid: usize, tol: f64) -> Vec<f64> {
    let xs: Vec<f64> = (0..=grid).map(|k| k as f64 / grid as f64).collect();
    let gs: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let mut roots = Vec::new();
    for k in 0..=grid {
        if gs[k] == 0.0 {
            roots.push(xs[k]);
        }
        if k < grid && gs[k] != 0.0 && gs[k + 1] != 0.0 && (gs[k] > 0.0) != (gs[k + 1] > 0.0) {
            roots.push(bisect(&g, xs[k], xs[k + 1], tol));
        }
        if k > 0 && k < grid {
            let same_sign = gs[k - 1] * gs[k] > 0.0 && gs[k] * gs[k + 1] > 0.0;
            if same_sign && gs[k].abs() <= gs[k - 1].abs() && gs[k].abs() <= gs[k + 1].abs() {
                let a = min_abs(&g, xs[k - 1], xs[k + 1]);
                if g(a).abs() <= tol {
                    roots.push(a);
                }
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
    roots
}

/// Roots of `φ(a) = a` on `[0,1]`, each annotated with `φ'(a*)`.
pub fn solve_fixed_points(p: &PhiPoly, grid: usize, tol: f64) -> Result<Vec<FixedPoint>> {
    if grid < 64 {
        return domain(format!("scan grid must have at least 64 intervals, got {grid}"));
    }
    if !(tol > 0.0) {
        return domain("tolerance must be positive");
    }
    let roots = scan_roots(|a| p.phi_unchecked(a) - a, grid, tol);
    let unique = roots.len() == 1;
    Ok(roots
        .into_iter()
        .map(|a| FixedPoint {
            unique,
            ..FixedPoint::at(p, a)
        })
        .collect())
}

/// `E Δ_s L(Z)` for `Z` Erdős–Rényi(`a`) on the model's `n` vertices, exactly:
/// `Σ β_ℓ 2 e_ℓ a^{e_ℓ-1} (n-2)...(n-v_ℓ+1) / (n (n-1)...(n-v_ℓ+3))`.
pub fn expected_delta_l_er(m: &ErgmModel, a: f64) -> f64 {
    let n = m.n();
    m.terms()
        .iter()
        .map(|(h, b)| {
            let through = 2.0 * h.e() as f64 * falling(n - 2, h.v() - 2);
            b * through * a.powi(h.e() as i32 - 1) / falling(n, h.v() - 2)
        })
        .sum()
}

/// Roots of the finite-`n` equation `a = (1 + tanh(½ E Δ_s L(Z_a))) / 2`.
pub fn finite_n_fixed_points(m: &ErgmModel, grid: usize, tol: f64) -> Result<Vec<f64>> {
    if grid < 64 || !(tol > 0.0) {
        return domain("grid ≥ 64 and tol > 0 are required");
    }
    Ok(scan_roots(
        |a| 0.5 * (1.0 + (0.5 * expected_delta_l_er(m, a)).tanh()) - a,
        grid,
        tol,
    ))
}

/// Which solution of the Ising mean-field system to return.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsingBranch {
    /// `p ≡ ½`, which always solves the system.
    Symmetric,
    /// Damped iteration started from `p ≡ 0.9`.
    Positive,
}

/// `T(p)_s = (1 + tanh((2β/N) Σ_{t∈𝒩_s} (2p_t - 1))) / 2`.
fn ising_map(m: &IsingModel, p: &[f64]) -> Vec<f64> {
    let scale = 2.0 * m.beta() / m.n() as f64;
    m.neighborhoods()
        .iter()
        .map(|nb| {
            let field: f64 = nb.iter().map(|&t| 2.0 * p[t] - 1.0).sum();
            0.5 * (1.0 + (scale * field).tanh())
        })
        .collect()
}

/// `max_s |T(p)_s - p_s|`.
pub fn ising_residual(m: &IsingModel, p: &[f64]) -> f64 {
    ising_map(m, p)
        .iter()
        .zip(p)
        .map(|(t, q)| (t - q).abs())
        .fold(0.0, f64::max)
}

pub const ISING_MAX_ITER: usize = 1_000_000;

/// Solves `2p_s - 1 = tanh((2β/N) Σ_{t∈𝒩_s} (2p_t - 1))` with damping 0.5.
pub fn ising_fixed_point(m: &IsingModel, tol: f64, branch: IsingBranch) -> Result<Vec<f64>> {
    if !(tol > 0.0) {
        return domain("tolerance must be positive");
    }
    let n = m.n();
    let half = vec![0.5; n];
    if branch == IsingBranch::Symmetric {
        return Ok(half);
    }
    let lambda = 0.5;
    let mut p = vec![0.9; n];
    let mut residual = f64::INFINITY;
    for _ in 0..ISING_MAX_ITER {
        let t = ising_map(m, &p);
        residual = t.iter().zip(&p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if residual <= tol {
            return Ok(p);
        }
        for (ps, ts) in p.iter_mut().zip(&t) {
            *ps = (1.0 - lambda) * *ps + lambda * ts;
        }
    }
    Err(Error::IterationLimit {
        iterations: ISING_MAX_ITER,
        residual,
    })
}

/// Erdős–Rényi(`a*`) on the model's pairs, after checking `|φ(a*) - a*| ≤ tol`.
pub fn ergm_reference_law(m: &ErgmModel, fp: &FixedPoint, tol: f64) -> Result<ProductLaw> {
    let p = PhiPoly::from_model(m);
    let r = (p.phi(fp.a_star)? - fp.a_star).abs();
    if r > tol {
        return Err(Error::Rejected(format!(
            "a* = {} leaves residual {r:e} in φ(a) = a",
            fp.a_star
        )));
    }
    ProductLaw::constant(crate::graph::num_pairs(m.n()), fp.a_star)
}

/// The product law with marginals `p`, after checking the Ising mean-field residual.
pub fn ising_reference_law(m: &IsingModel, p: &[f64], tol: f64) -> Result<ProductLaw> {
    if p.len() != m.n() {
        return domain("one marginal per site is required");
    }
    let r = ising_residual(m, p);
    if r > tol {
        return Err(Error::Rejected(format!(
            "marginals leave residual {r:e} in the mean-field system"
        )));
    }
    ProductLaw::new(p.to_vec())
}
