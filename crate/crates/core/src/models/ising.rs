use super::GibbsModel;
use crate::error::{domain, Result};
use crate::graph::Config;

/// Ising model on sites `0..N` with neighbourhoods `𝒩_s`:
/// `L(x) = (β/N) Σ_s Σ_{t∈𝒩_s} (2x_s - 1)(2x_t - 1)`.
///
/// Spins are stored as bits; the sum runs over ordered neighbour pairs, so
/// each edge contributes twice.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    beta: f64,
    neighborhoods: Vec<Vec<usize>>,
}

impl IsingModel {
    /// Validates symmetry (`u ∈ 𝒩_s ⇔ s ∈ 𝒩_u`) and the absence of self-neighbours.
    pub fn new(beta: f64, mut neighborhoods: Vec<Vec<usize>>) -> Result<Self> {
        if !beta.is_finite() {
            return domain("β must be finite");
        }
        let n = neighborhoods.len();
        if n == 0 {
            return domain("an Ising model needs at least one site");
        }
        for (s, nb) in neighborhoods.iter_mut().enumerate() {
            nb.sort_unstable();
            if nb.windows(2).any(|w| w[0] == w[1]) {
                return domain(format!("site {s} lists a neighbour twice"));
            }
            if nb.contains(&s) {
                return domain(format!("site {s} is its own neighbour"));
            }
            if let Some(&t) = nb.iter().find(|&&t| t >= n) {
                return domain(format!("site {s} has neighbour {t} outside 0..{n}"));
            }
        }
        for s in 0..n {
            for &t in &neighborhoods[s] {
                if neighborhoods[t].binary_search(&s).is_err() {
                    return domain(format!("neighbourhoods not symmetric: {t} ∈ 𝒩_{s} but not conversely"));
                }
            }
        }
        Ok(IsingModel {
            beta,
            neighborhoods,
        })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)], beta: f64) -> Result<Self> {
        let mut nb = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return domain(format!("edge {a}-{b} outside 0..{n}"));
            }
            nb[a].push(b);
            nb[b].push(a);
        }
        Self::new(beta, nb)
    }

    /// Curie–Weiss structure: every site neighbours every other.
    pub fn complete(n: usize, beta: f64) -> Result<Self> {
        let nb = (0..n).map(|s| (0..n).filter(|&t| t != s).collect()).collect();
        Self::new(beta, nb)
    }

    pub fn cycle(n: usize, beta: f64) -> Result<Self> {
        if n < 3 {
            return domain("a cycle needs at least three sites");
        }
        let edges: Vec<_> = (0..n).map(|s| (s, (s + 1) % n)).collect();
        Self::from_edges(n, &edges, beta)
    }

    pub fn path(n: usize, beta: f64) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|s| (s - 1, s)).collect();
        Self::from_edges(n, &edges, beta)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(beta, self.neighborhoods.clone())
    }

    pub fn n(&self) -> usize {
        self.neighborhoods.len()
    }

    pub fn neighborhoods(&self) -> &[Vec<usize>] {
        &self.neighborhoods
    }

    /// `r = max_s |𝒩_s|`.
    pub fn max_degree(&self) -> usize {
        self.neighborhoods.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Undirected edges `s < t`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (s, nb) in self.neighborhoods.iter().enumerate() {
            out.extend(nb.iter().filter(|&&t| t > s).map(|&t| (s, t)));
        }
        out
    }
}

#[inline]
fn spin(x: &Config, s: usize) -> f64 {
    if x.get(s) {
        1.0
    } else {
        -1.0
    }
}

impl GibbsModel for IsingModel {
    fn dim(&self) -> usize {
        self.n()
    }

    fn delta_l(&self, x: &Config, s: usize) -> f64 {
        let field: f64 = self.neighborhoods[s].iter().map(|&t| spin(x, t)).sum();
        4.0 * self.beta / self.n() as f64 * field
    }

    fn log_weight(&self, x: &Config) -> f64 {
        let mut acc = 0.0;
        for (s, nb) in self.neighborhoods.iter().enumerate() {
            let xs = spin(x, s);
            acc += nb.iter().map(|&t| xs * spin(x, t)).sum::<f64>();
        }
        self.beta / self.n() as f64 * acc
    }

    fn dependency(&self, r: usize) -> Vec<usize> {
        self.neighborhoods[r].clone()
    }
}
