use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::Config;
use crate::models::{ExactDistribution, GibbsModel};

/// Largest `N` for which the dense `2^N × 2^N` kernel is built.
pub const KERNEL_MAX_DIM: usize = 10;

/// One-step transition matrix of the Glauber jump chain, rows indexed by
/// the current state's mask.
pub fn transition_kernel<M: GibbsModel + ?Sized>(model: &M) -> Result<DMatrix<f64>> {
    let dim = model.dim();
    if dim > KERNEL_MAX_DIM {
        return Err(Error::Capacity {
            what: "transition kernel",
            needed: dim,
            limit: KERNEL_MAX_DIM,
        });
    }
    let states = 1usize << dim;
    let mut p = DMatrix::<f64>::zeros(states, states);
    let w = 1.0 / dim as f64;
    for mask in 0..states {
        let x = Config::from_mask(dim, mask as u64);
        for s in 0..dim {
            let q = model.conditional(&x, s);
            let up = mask | (1 << s);
            let down = mask & !(1 << s);
            p[(mask, up)] += w * q;
            p[(mask, down)] += w * (1.0 - q);
        }
    }
    Ok(p)
}

/// Stationary vector of a row-stochastic kernel, from `π(P - I) = 0`,
/// `Σπ = 1` solved by LU.
pub fn stationary_distribution(p: &DMatrix<f64>) -> Result<ExactDistribution> {
    let states = p.nrows();
    if states != p.ncols() || !states.is_power_of_two() {
        return Err(Error::Domain("kernel must be square over {0,1}^N".into()));
    }
    let mut a = p.transpose() - DMatrix::<f64>::identity(states, states);
    for c in 0..states {
        a[(states - 1, c)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(states);
    rhs[states - 1] = 1.0;
    let pi = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Domain("kernel has no unique stationary law".into()))?;
    let probs: Vec<f64> = pi.iter().map(|v| v.max(0.0)).collect();
    ExactDistribution::from_probs(states.trailing_zeros() as usize, probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meanfield::{solve_fixed_points, ergm_reference_law, PhiPoly, DEFAULT_GRID, DEFAULT_TOL};
    use crate::models::{detailed_balance_residual, exact_distribution, ErgmModel, IsingModel, ProductLaw};

    #[test]
    fn rows_are_stochastic() {
        let m = ErgmModel::triangle(4, -0.3, 0.9).unwrap();
        let p = transition_kernel(&m).unwrap();
        for r in 0..p.nrows() {
            assert!((p.row(r).sum() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn stationary_vector_is_the_gibbs_measure() {
        let m = ErgmModel::two_star(4, 0.4, -0.8).unwrap();
        let pi = stationary_distribution(&transition_kernel(&m).unwrap()).unwrap();
        let exact = exact_distribution(&m).unwrap();
        assert!(pi.total_variation(&exact) < 1e-10);
        assert!(detailed_balance_residual(&m, &exact) < 1e-12);
    }

    #[test]
    fn edge_only_stationary_law_is_the_product_law() {
        let m = ErgmModel::edge_only(4, -0.7).unwrap();
        let p = PhiPoly::from_model(&m);
        let fp = solve_fixed_points(&p, DEFAULT_GRID, DEFAULT_TOL).unwrap()[0];
        let law: ProductLaw = ergm_reference_law(&m, &fp, DEFAULT_TOL).unwrap();
        let pi = stationary_distribution(&transition_kernel(&m).unwrap()).unwrap();
        let prod = exact_distribution(&law).unwrap();
        assert!(pi.total_variation(&prod) < 1e-10);
    }

    #[test]
    fn ising_kernel_is_reversible() {
        let m = IsingModel::cycle(5, 1.3).unwrap();
        let p = transition_kernel(&m).unwrap();
        let pi = exact_distribution(&m).unwrap();
        let probs = pi.probs();
        let mut worst: f64 = 0.0;
        for a in 0..32 {
            for b in 0..32 {
                worst = worst.max((probs[a] * p[(a, b)] - probs[b] * p[(b, a)]).abs());
            }
        }
        assert!(worst < 1e-15);
    }

    #[test]
    fn large_kernels_are_refused() {
        let m = ErgmModel::edge_only(6, 0.0).unwrap();
        assert!(matches!(transition_kernel(&m), Err(Error::Capacity { .. })));
    }
}
