use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::bounds::{matrix_norm, PNorm};
use crate::error::{Error, Result};
use crate::graph::{delta2_t, Config, EdgeIndex, LabeledGraph};
use crate::models::{ErgmModel, GibbsModel, IsingModel, Model, ProductLaw};

/// Largest `N` for the pruned exact influence matrix.
pub const EXACT_INFLUENCE_MAX_DIM: usize = 20;

/// Largest `N` for the unpruned cross-check.
pub const FULL_INFLUENCE_MAX_DIM: usize = 12;

/// `Σ_{st ≠ ij} |q(x^{(ij,1)}, st) - q(x^{(ij,0)}, st)|`.
pub fn influence_sum<M: GibbsModel + ?Sized>(model: &M, x: &Config, ij: usize) -> f64 {
    let up = x.with(ij, true);
    let down = x.with(ij, false);
    (0..model.dim())
        .filter(|&st| st != ij)
        .map(|st| (model.conditional(&up, st) - model.conditional(&down, st)).abs())
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfluenceKind {
    /// `max_x |q(x^{(s,1)}, r) - q(x^{(s,0)}, r)|`.
    Exact,
    /// A state-free entrywise upper bound.
    AnalyticBound,
}

/// `entries[(r, s)]`: influence of coordinate `s` on the update at `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceMatrix {
    pub entries: DMatrix<f64>,
    pub kind: InfluenceKind,
}

impl InfluenceMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn norm(&self, p: PNorm) -> f64 {
        matrix_norm(&self.entries, p)
    }

    /// Every entry of `self` is at most the matching entry of `other`
    /// (plus `tol`).
    pub fn dominated_by(&self, other: &InfluenceMatrix, tol: f64) -> bool {
        self.entries.shape() == other.entries.shape()
            && self.entries.iter().zip(other.entries.iter()).all(|(a, b)| *a <= *b + tol)
    }
}

/// Model families with a closed-form dominating influence matrix.
pub trait AnalyticInfluence {
    fn analytic_influence(&self) -> DMatrix<f64>;
}

impl AnalyticInfluence for ErgmModel {
    /// `¼ Σ_ℓ |β_ℓ| Δ_st Δ_ij t(H_ℓ, K_n) / denom_ℓ`, capped at 1.
    fn analytic_influence(&self) -> DMatrix<f64> {
        let n = self.n();
        let dim = self.dim();
        let kn = LabeledGraph::complete(n);
        // Δ_stΔ_ij t on K_n depends only on whether the pairs share a vertex.
        let value = |s: EdgeIndex, r: EdgeIndex| -> f64 {
            let sum: f64 = self
                .terms()
                .iter()
                .enumerate()
                .filter(|(_, (_, b))| *b != 0.0)
                .map(|(l, (h, b))| {
                    let d = delta2_t(h, &kn, s, r).expect("distinct pairs in K_n");
                    b.abs() * d as f64 / self.denominator(l)
                })
                .sum();
            (0.25 * sum).min(1.0)
        };
        let mut touching = None;
        let mut disjoint = None;
        let mut out = DMatrix::<f64>::zeros(dim, dim);
        for r in 0..dim {
            for s in 0..dim {
                if r == s {
                    continue;
                }
                let (er, es) = (self.edge_index(r), self.edge_index(s));
                let slot = if er.touches(&es) { &mut touching } else { &mut disjoint };
                out[(r, s)] = *slot.get_or_insert_with(|| value(er, es));
            }
        }
        out
    }
}

impl AnalyticInfluence for IsingModel {
    /// `tanh(2|β|/N)` on the interaction graph.
    fn analytic_influence(&self) -> DMatrix<f64> {
        let dim = self.n();
        let w = (2.0 * self.beta().abs() / dim as f64).tanh();
        let mut out = DMatrix::<f64>::zeros(dim, dim);
        for (r, nb) in self.neighborhoods().iter().enumerate() {
            for &s in nb {
                out[(r, s)] = w;
            }
        }
        out
    }
}

impl AnalyticInfluence for ProductLaw {
    fn analytic_influence(&self) -> DMatrix<f64> {
        let dim = self.p().len();
        DMatrix::zeros(dim, dim)
    }
}

impl AnalyticInfluence for Model {
    fn analytic_influence(&self) -> DMatrix<f64> {
        match self {
            Model::Ising(m) => m.analytic_influence(),
            Model::Ergm(m) => m.analytic_influence(),
        }
    }
}

/// Builds the influence matrix of the requested kind.
///
/// The exact kind enumerates, for each `(r, s)`, only the bits that
/// `conditional(·, r)` reads.
pub fn influence_matrix<M>(model: &M, kind: InfluenceKind) -> Result<InfluenceMatrix>
where
    M: GibbsModel + AnalyticInfluence + ?Sized,
{
    let entries = match kind {
        InfluenceKind::AnalyticBound => model.analytic_influence(),
        InfluenceKind::Exact => exact_pruned(model)?,
    };
    Ok(InfluenceMatrix { entries, kind })
}

fn exact_pruned<M: GibbsModel + ?Sized>(model: &M) -> Result<DMatrix<f64>> {
    let dim = model.dim();
    if dim > EXACT_INFLUENCE_MAX_DIM {
        return Err(Error::Capacity {
            what: "exact influence matrix",
            needed: dim,
            limit: EXACT_INFLUENCE_MAX_DIM,
        });
    }
    let rows: Vec<Vec<f64>> = (0..dim)
        .into_par_iter()
        .map(|r| {
            let dep = model.dependency(r);
            let mut row = vec![0.0; dim];
            for &s in &dep {
                let others: Vec<usize> = dep.iter().copied().filter(|&t| t != s).collect();
                let mut best: f64 = 0.0;
                for mask in 0..(1u64 << others.len()) {
                    let mut x = Config::zeros(dim);
                    for (k, &t) in others.iter().enumerate() {
                        if (mask >> k) & 1 == 1 {
                            x.set(t, true);
                        }
                    }
                    let up = model.conditional(&x.with(s, true), r);
                    let down = model.conditional(&x.with(s, false), r);
                    best = best.max((up - down).abs());
                }
                row[s] = best;
            }
            row
        })
        .collect();
    Ok(DMatrix::from_fn(dim, dim, |r, s| rows[r][s]))
}

/// Exact influence matrix by enumerating all `2^N` states.
pub fn exact_influence_full<M: GibbsModel + ?Sized>(model: &M) -> Result<InfluenceMatrix> {
    let dim = model.dim();
    if dim > FULL_INFLUENCE_MAX_DIM {
        return Err(Error::Capacity {
            what: "full-enumeration influence matrix",
            needed: dim,
            limit: FULL_INFLUENCE_MAX_DIM,
        });
    }
    let rows: Vec<Vec<f64>> = (0..dim)
        .into_par_iter()
        .map(|r| {
            let mut row = vec![0.0f64; dim];
            for mask in 0..(1u64 << dim) {
                let x = Config::from_mask(dim, mask);
                for (s, slot) in row.iter_mut().enumerate() {
                    if s == r || x.get(s) {
                        continue;
                    }
                    let d = (model.conditional(&x.with(s, true), r) - model.conditional(&x, r)).abs();
                    *slot = slot.max(d);
                }
            }
            row
        })
        .collect();
    Ok(InfluenceMatrix {
        entries: DMatrix::from_fn(dim, dim, |r, s| rows[r][s]),
        kind: InfluenceKind::Exact,
    })
}

/// `B = (1 - 1/N) I + R/N`.
pub fn b_matrix(r: &DMatrix<f64>) -> DMatrix<f64> {
    let dim = r.nrows();
    let nf = dim as f64;
    DMatrix::<f64>::identity(dim, dim) * (1.0 - 1.0 / nf) + r / nf
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BNormCheck {
    pub p: PNorm,
    pub r_norm: f64,
    pub b_norm: f64,
    /// `ε = 1 - ‖R‖_p`.
    pub eps: f64,
    /// `1 - ε/N`.
    pub limit: f64,
    pub holds: bool,
}

/// Compares `‖B‖_p` with `1 - ε/N`.
pub fn check_b_norm(r: &DMatrix<f64>, p: PNorm) -> BNormCheck {
    let nf = r.nrows() as f64;
    let r_norm = matrix_norm(r, p);
    let b_norm = matrix_norm(&b_matrix(r), p);
    let eps = 1.0 - r_norm;
    let limit = 1.0 - eps / nf;
    BNormCheck {
        p,
        r_norm,
        b_norm,
        eps,
        limit,
        holds: b_norm <= limit + 1e-12,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meanfield::PhiPoly;

    #[test]
    fn edge_only_influence_is_zero() {
        let m = ErgmModel::edge_only(5, 1.3).unwrap();
        for kind in [InfluenceKind::Exact, InfluenceKind::AnalyticBound] {
            let r = influence_matrix(&m, kind).unwrap();
            assert!(r.entries.iter().all(|v| *v == 0.0));
        }
        assert_eq!(influence_sum(&m, &Config::ones(10), 4), 0.0);
    }

    #[test]
    fn pruned_exact_equals_full_enumeration() {
        for m in [
            ErgmModel::triangle(4, -0.5, 1.2).unwrap(),
            ErgmModel::two_star(4, 0.3, -0.9).unwrap(),
            ErgmModel::triangle(5, 0.1, 0.8).unwrap(),
        ] {
            let a = influence_matrix(&m, InfluenceKind::Exact).unwrap();
            let b = exact_influence_full(&m).unwrap();
            assert!((a.entries.clone() - b.entries).abs().max() < 1e-15);
        }
        let ising = IsingModel::cycle(7, 2.0).unwrap();
        let a = influence_matrix(&ising, InfluenceKind::Exact).unwrap();
        let b = exact_influence_full(&ising).unwrap();
        assert!((a.entries - b.entries).abs().max() < 1e-15);
    }

    #[test]
    fn exact_is_dominated_by_analytic() {
        for m in [
            ErgmModel::triangle(4, -1.0, 2.5).unwrap(),
            ErgmModel::two_star(4, 0.7, -1.4).unwrap(),
            ErgmModel::triangle(5, 0.0, -0.9).unwrap(),
        ] {
            let e = influence_matrix(&m, InfluenceKind::Exact).unwrap();
            let a = influence_matrix(&m, InfluenceKind::AnalyticBound).unwrap();
            assert!(e.dominated_by(&a, 1e-15));
            for r in 0..e.dim() {
                assert_eq!(e.entries[(r, r)], 0.0);
                assert_eq!(a.entries[(r, r)], 0.0);
            }
        }
    }

    #[test]
    fn analytic_column_sums_respect_the_cap() {
        let m = ErgmModel::triangle(6, 0.2, -0.8).unwrap();
        let a = m.analytic_influence();
        let cap = 0.5 * PhiPoly::from_model(&m).abs_phi_prime(1.0);
        for s in 0..a.ncols() {
            assert!(a.column(s).sum() <= cap + 1e-12);
        }
    }

    #[test]
    fn ising_analytic_entry_is_attained_at_a_path_end() {
        // Site 0 has a single neighbor, so its field can sit at zero.
        let m = IsingModel::path(6, 1.5).unwrap();
        let e = influence_matrix(&m, InfluenceKind::Exact).unwrap();
        let a = influence_matrix(&m, InfluenceKind::AnalyticBound).unwrap();
        assert!(e.dominated_by(&a, 1e-15));
        let w = (3.0f64 / 6.0).tanh();
        assert!((e.entries[(0, 1)] - w).abs() < 1e-15);
    }

    #[test]
    fn b_norm_identity_for_one_and_inf() {
        let m = ErgmModel::two_star(6, 0.0, 0.5).unwrap();
        let r = m.analytic_influence();
        for p in [PNorm::One, PNorm::Inf] {
            let c = check_b_norm(&r, p);
            assert!(c.holds);
            assert!((c.b_norm - c.limit).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_capacity_is_enforced() {
        let m = ErgmModel::edge_only(7, 0.0).unwrap();
        assert!(matches!(
            influence_matrix(&m, InfluenceKind::Exact),
            Err(Error::Capacity { .. })
        ));
    }
}
