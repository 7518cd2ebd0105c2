//! Gibbs measures `P(x) ∝ exp{L(x)}` on `{0,1}^N` and product reference laws.
//!
//! Every model exposes `Δ_s L(x) = L(x^{(s,1)}) - L(x^{(s,0)})`, from which the
//! Glauber update probability `q(x^{(s,1)} | x) = (1 + tanh(Δ_s L / 2)) / 2`
//! follows.

mod ergm;
mod exact;
mod file;
mod ising;
mod product;

pub use ergm::ErgmModel;
pub use exact::{detailed_balance_residual, exact_distribution, ExactDistribution, MAX_EXACT_DIM};
pub use file::{parse_model, read_model, write_model, Model, SCHEMA_VERSION};
pub use ising::IsingModel;
pub use product::ProductLaw;

use crate::graph::Config;

/// `(1 + tanh(d/2)) / 2`, the logistic function written so that it stays
/// accurate for large `|d|` and maps `±∞` to `1` and `0`.
#[inline]
pub fn logistic(d: f64) -> f64 {
    0.5 * (1.0 + (0.5 * d).tanh())
}

/// A measure on `{0,1}^N` given through its unnormalized log-weight.
pub trait GibbsModel: Sync {
    /// Number of coordinates `N`.
    fn dim(&self) -> usize;

    /// `Δ_s L(x)`. Never reads `x_s`.
    fn delta_l(&self, x: &Config, s: usize) -> f64;

    /// `L(x)`, up to an additive constant.
    fn log_weight(&self, x: &Config) -> f64;

    /// Glauber update probability `q(x^{(s,1)} | x)`.
    fn conditional(&self, x: &Config, s: usize) -> f64 {
        logistic(self.delta_l(x, s))
    }

    /// Coordinates other than `r` that `conditional(·, r)` can depend on.
    fn dependency(&self, r: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&t| t != r).collect()
    }
}
