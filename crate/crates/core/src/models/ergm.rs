use super::GibbsModel;
use crate::error::{domain, Result};
use crate::graph::{
    all_pairs, delta_t, falling, injection_count, num_pairs, Config, EdgeIndex, GraphView, Motif,
    MotifKind,
};

/// Exponential random graph model on `n` vertices:
/// `L(x) = Σ_ℓ β_ℓ t(H_ℓ, x) / (n (n-1) ... (n - v_ℓ + 3))`, with `H_1` the edge.
#[derive(Debug, Clone, PartialEq)]
pub struct ErgmModel {
    n: usize,
    terms: Vec<(Motif, f64)>,
    denominators: Vec<f64>,
    pairs: Vec<(usize, usize)>,
}

impl ErgmModel {
    pub fn new(n: usize, terms: Vec<(Motif, f64)>) -> Result<Self> {
        match terms.first() {
            Some((h, _)) if h.kind() == MotifKind::Edge => {}
            _ => return domain("the first ERGM term must be the single edge"),
        }
        for (h, b) in &terms {
            if !b.is_finite() {
                return domain(format!("coefficient of {} is not finite", h.label()));
            }
            if !h.is_connected() {
                return domain(format!("ERGM motif {h} is not connected"));
            }
            if h.v() > n {
                return domain(format!("motif {} has more than n = {n} vertices", h.label()));
            }
        }
        let denominators = terms.iter().map(|(h, _)| falling(n, h.v() - 2)).collect();
        Ok(ErgmModel {
            n,
            terms,
            denominators,
            pairs: all_pairs(n),
        })
    }

    pub fn edge_only(n: usize, beta1: f64) -> Result<Self> {
        Self::new(n, vec![(Motif::edge(), beta1)])
    }

    pub fn two_star(n: usize, beta1: f64, beta2: f64) -> Result<Self> {
        Self::new(n, vec![(Motif::edge(), beta1), (Motif::two_star(), beta2)])
    }

    pub fn triangle(n: usize, beta1: f64, beta2: f64) -> Result<Self> {
        Self::new(n, vec![(Motif::edge(), beta1), (Motif::triangle(), beta2)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(Motif, f64)] {
        &self.terms
    }

    pub fn betas(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.1).collect()
    }

    /// `(β_ℓ, e_ℓ)` pairs.
    pub fn coefficients(&self) -> Vec<(f64, usize)> {
        self.terms.iter().map(|(h, b)| (*b, h.e())).collect()
    }

    /// Normalizing denominator of `t_ℓ`, `n (n-1) ... (n - v_ℓ + 3)`.
    pub fn denominator(&self, l: usize) -> f64 {
        self.denominators[l]
    }

    /// Copy with coefficient `l` replaced.
    pub fn with_beta(&self, l: usize, beta: f64) -> Result<Self> {
        let mut terms = self.terms.clone();
        match terms.get_mut(l) {
            Some(t) => t.1 = beta,
            None => return domain(format!("model has no term {l}")),
        }
        Self::new(self.n, terms)
    }

    pub fn edge_index(&self, s: usize) -> EdgeIndex {
        let (i, j) = self.pairs[s];
        EdgeIndex { i, j, linear: s }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// `t_ℓ(x)`.
    pub fn t_l(&self, l: usize, x: &Config) -> f64 {
        let g = GraphView::new(self.n, x);
        injection_count(&self.terms[l].0, &g).expect("motif fits by construction") as f64
            / self.denominators[l]
    }

    /// `Δ_s t_ℓ(x)`.
    pub fn delta_t_l(&self, l: usize, x: &Config, s: usize) -> f64 {
        let g = GraphView::new(self.n, x);
        delta_t(&self.terms[l].0, &g, self.edge_index(s)).expect("valid pair") as f64
            / self.denominators[l]
    }

    fn local(&self) -> bool {
        self.terms.iter().all(|(h, _)| h.v() <= 3)
    }
}

impl GibbsModel for ErgmModel {
    fn dim(&self) -> usize {
        num_pairs(self.n)
    }

    fn delta_l(&self, x: &Config, s: usize) -> f64 {
        let g = GraphView::new(self.n, x);
        let e = self.edge_index(s);
        self.terms
            .iter()
            .zip(&self.denominators)
            .map(|((h, b), d)| {
                if *b == 0.0 {
                    0.0
                } else {
                    b * delta_t(h, &g, e).expect("valid pair") as f64 / d
                }
            })
            .sum()
    }

    fn log_weight(&self, x: &Config) -> f64 {
        (0..self.terms.len())
            .filter(|&l| self.terms[l].1 != 0.0)
            .map(|l| self.terms[l].1 * self.t_l(l, x))
            .sum()
    }

    /// Motifs on at most three vertices only see pairs that share a vertex
    /// with `r`; larger motifs can reach any pair.
    fn dependency(&self, r: usize) -> Vec<usize> {
        let only_edge = self.terms.iter().skip(1).all(|t| t.1 == 0.0);
        if only_edge {
            return Vec::new();
        }
        let (a, b) = self.pairs[r];
        (0..self.dim())
            .filter(|&t| {
                let (c, d) = self.pairs[t];
                t != r && (!self.local() || c == a || c == b || d == a || d == b)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::LabeledGraph;

    #[test]
    fn rejects_bad_term_lists() {
        assert!(ErgmModel::new(4, vec![(Motif::triangle(), 1.0)]).is_err());
        assert!(ErgmModel::new(2, vec![(Motif::edge(), 0.0), (Motif::triangle(), 1.0)]).is_err());
        assert!(ErgmModel::new(4, vec![]).is_err());
        assert!(ErgmModel::edge_only(4, f64::INFINITY).is_err());
    }

    #[test]
    fn edge_only_delta_is_constant() {
        let m = ErgmModel::edge_only(5, 0.5).unwrap();
        for mask in [0u64, 17, 1023] {
            let x = Config::from_mask(10, mask);
            for s in 0..10 {
                assert_eq!(m.delta_l(&x, s), 1.0);
                let e = 1f64.exp();
                assert!((m.conditional(&x, s) - e / (e + 1.0)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn triangle_delta_on_k4_minus_an_edge() {
        let m = ErgmModel::triangle(4, -0.4, 0.9).unwrap();
        let x = LabeledGraph::complete(4).with(0, false).into_config();
        // Both triangles through (0,1) appear once (0,1) is added: 2 × 3! injections.
        let expected = -0.4 * 2.0 + 0.9 * 12.0 / 4.0;
        assert!((m.delta_l(&x, 0) - expected).abs() < 1e-14);
    }

    #[test]
    fn delta_l_matches_log_weights_and_ignores_own_bit() {
        let m = ErgmModel::new(
            5,
            vec![
                (Motif::edge(), -0.3),
                (Motif::two_star(), 0.4),
                (Motif::triangle(), -0.7),
                ("v=4; edges=0-1,1-2,2-3".parse().unwrap(), 0.2),
            ],
        )
        .unwrap();
        for mask in (0..1024u64).step_by(37) {
            let x = Config::from_mask(10, mask);
            for s in 0..10 {
                let d = m.log_weight(&x.with(s, true)) - m.log_weight(&x.with(s, false));
                assert!((d - m.delta_l(&x, s)).abs() < 1e-12);
                assert_eq!(m.delta_l(&x.with(s, true), s), m.delta_l(&x.with(s, false), s));
            }
        }
    }

    #[test]
    fn dependency_sets_cover_the_conditional() {
        let m = ErgmModel::triangle(5, 0.1, 0.8).unwrap();
        for r in 0..10 {
            let dep = m.dependency(r);
            assert_eq!(dep.len(), 6);
            for t in (0..10).filter(|t| *t != r && !dep.contains(t)) {
                for mask in 0..1024u64 {
                    let x = Config::from_mask(10, mask);
                    assert_eq!(m.delta_l(&x, r), m.delta_l(&x.with(t, !x.get(t)), r));
                }
            }
        }
        assert!(ErgmModel::edge_only(5, 1.0).unwrap().dependency(0).is_empty());
    }
}
