use rand::Rng;

use super::GibbsModel;
use crate::error::{domain, Result};
use crate::graph::Config;

/// Independent coordinates with `P(Y_s = 1) = p_s`.
///
/// Coordinates with `p_s ∈ {0, 1}` are frozen: their Glauber update is
/// deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductLaw {
    p: Vec<f64>,
}

impl ProductLaw {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if let Some((s, v)) = p.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return domain(format!("p_{s} = {v} is not a probability"));
        }
        Ok(ProductLaw { p })
    }

    /// Erdős–Rényi law: every one of the `dim` coordinates is Bernoulli(`a`).
    pub fn constant(dim: usize, a: f64) -> Result<Self> {
        Self::new(vec![a; dim])
    }

    pub fn uniform(dim: usize) -> Self {
        ProductLaw { p: vec![0.5; dim] }
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// `q_Y(x^{(s,1)} | x) = p_s`, whatever `x` is.
    pub fn product_conditional(&self, s: usize) -> f64 {
        self.p[s]
    }

    pub fn is_frozen(&self, s: usize) -> bool {
        self.p[s] == 0.0 || self.p[s] == 1.0
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Config {
        let mut x = Config::zeros(self.p.len());
        for (s, &p) in self.p.iter().enumerate() {
            x.set(s, rng.gen::<f64>() < p);
        }
        x
    }

    /// `P(Y = x)`.
    pub fn probability(&self, x: &Config) -> f64 {
        self.p
            .iter()
            .enumerate()
            .map(|(s, &p)| if x.get(s) { p } else { 1.0 - p })
            .product()
    }
}

impl GibbsModel for ProductLaw {
    fn dim(&self) -> usize {
        self.p.len()
    }

    /// `log(p_s / (1 - p_s))`, infinite on frozen coordinates.
    fn delta_l(&self, _x: &Config, s: usize) -> f64 {
        let p = self.p[s];
        p.ln() - (-p).ln_1p()
    }

    fn log_weight(&self, x: &Config) -> f64 {
        self.p
            .iter()
            .enumerate()
            .map(|(s, &p)| if x.get(s) { p.ln() } else { (-p).ln_1p() })
            .sum()
    }

    fn conditional(&self, _x: &Config, s: usize) -> f64 {
        self.p[s]
    }

    fn dependency(&self, _r: usize) -> Vec<usize> {
        Vec::new()
    }
}
