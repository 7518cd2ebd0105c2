use rayon::prelude::*;

use super::GibbsModel;
use crate::error::{Error, Result};
use crate::graph::Config;

/// Largest `N` accepted by [`exact_distribution`].
pub const MAX_EXACT_DIM: usize = 24;

/// A probability table over `{0,1}^N`, indexed by the bit mask of the state.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    dim: usize,
    probs: Vec<f64>,
}

/// Normalizes `exp{L(x)}` over all `2^N` states by log-sum-exp.
pub fn exact_distribution<M: GibbsModel + ?Sized>(model: &M) -> Result<ExactDistribution> {
    let dim = model.dim();
    if dim > MAX_EXACT_DIM {
        return Err(Error::Capacity {
            what: "exact enumeration",
            needed: dim,
            limit: MAX_EXACT_DIM,
        });
    }
    let logw: Vec<f64> = (0..1u64 << dim)
        .into_par_iter()
        .map(|mask| model.log_weight(&Config::from_mask(dim, mask)))
        .collect();
    let top = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return Err(Error::Domain("log-weights are not finite".into()));
    }
    let mut probs: Vec<f64> = logw.iter().map(|l| (l - top).exp()).collect();
    let z: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= z;
    }
    Ok(ExactDistribution { dim, probs })
}

impl ExactDistribution {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, x: &Config) -> f64 {
        self.probs[x.to_mask() as usize]
    }

    /// `(state, probability)` pairs in mask order.
    pub fn iter(&self) -> impl Iterator<Item = (Config, f64)> + '_ {
        let dim = self.dim;
        self.probs
            .iter()
            .enumerate()
            .map(move |(m, &p)| (Config::from_mask(dim, m as u64), p))
    }

    /// `E f(X)`.
    pub fn expect<F: Fn(&Config) -> f64>(&self, f: F) -> f64 {
        self.iter().map(|(x, p)| if p == 0.0 { 0.0 } else { p * f(&x) }).sum()
    }

    /// `P(X_s = 1)` for every coordinate.
    pub fn marginals(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for (mask, &p) in self.probs.iter().enumerate() {
            for (s, ms) in m.iter_mut().enumerate() {
                if mask >> s & 1 == 1 {
                    *ms += p;
                }
            }
        }
        m
    }

    pub fn total_variation(&self, other: &ExactDistribution) -> f64 {
        assert_eq!(self.dim, other.dim, "distributions live on different spaces");
        0.5 * self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }

    /// Wraps an already normalized table.
    pub fn from_probs(dim: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1usize << dim {
            return Err(Error::Domain(format!(
                "a table over {{0,1}}^{dim} needs {} entries",
                1usize << dim
            )));
        }
        Ok(ExactDistribution { dim, probs })
    }
}

/// `max |π(x) P(x → x^{(s,1)}) - π(x^{(s,1)}) P(x^{(s,1)} → x)|` over all
/// states and coordinates, for the single-site Glauber kernel of `model`.
pub fn detailed_balance_residual<M: GibbsModel + ?Sized>(
    model: &M,
    pi: &ExactDistribution,
) -> f64 {
    let dim = model.dim();
    let nf = dim as f64;
    let mut worst = 0.0f64;
    for mask in 0..1u64 << dim {
        let x = Config::from_mask(dim, mask);
        for s in (0..dim).filter(|&s| mask >> s & 1 == 0) {
            let up = x.with(s, true);
            let q = model.conditional(&x, s);
            let q_up = model.conditional(&up, s);
            let lhs = pi.prob(&x) * q / nf;
            let rhs = pi.prob(&up) * (1.0 - q_up) / nf;
            worst = worst.max((lhs - rhs).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ErgmModel, IsingModel, ProductLaw};

    #[test]
    fn edge_only_ergm_is_a_product_law() {
        let m = ErgmModel::edge_only(4, 0.8).unwrap();
        let d = exact_distribution(&m).unwrap();
        let p = (1.6f64).exp() / (1.0 + (1.6f64).exp());
        let law = exact_distribution(&ProductLaw::constant(6, p).unwrap()).unwrap();
        assert!(d.total_variation(&law) < 1e-12);
        assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_beta_is_uniform() {
        let m = ErgmModel::triangle(4, 0.0, 0.0).unwrap();
        let d = exact_distribution(&m).unwrap();
        assert!(d.probs().iter().all(|&p| (p - 1.0 / 64.0).abs() < 1e-15));
    }

    #[test]
    fn ising_three_sites() {
        let m = IsingModel::complete(3, 1.0).unwrap();
        let d = exact_distribution(&m).unwrap();
        // Aligned states: L = (1/3)·6 = 2; every other state: L = (1/3)·(-2).
        let aligned = 2f64.exp();
        let mixed = (-2.0f64 / 3.0).exp();
        let z = 2.0 * aligned + 6.0 * mixed;
        assert!((d.probs()[0] - aligned / z).abs() < 1e-14);
        assert!((d.probs()[1] - mixed / z).abs() < 1e-14);
        assert!(detailed_balance_residual(&m, &d) < 1e-15);
    }

    #[test]
    fn frozen_product_law_enumerates() {
        let law = ProductLaw::new(vec![1.0, 0.3]).unwrap();
        let d = exact_distribution(&law).unwrap();
        assert_eq!(d.probs()[0], 0.0);
        assert!((d.probs()[3] - 0.3).abs() < 1e-15);
        assert!((d.marginals()[1] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn capacity_guard() {
        let m = ErgmModel::edge_only(8, 0.1).unwrap();
        assert!(matches!(exact_distribution(&m), Err(Error::Capacity { .. })));
    }
}
