use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{delta_t, num_pairs, Config, EdgeIndex, GraphView, Motif, MotifKind};
use crate::models::{ErgmModel, ProductLaw, MAX_EXACT_DIM};
use crate::stats::{exact_product_expectation, substream, Estimate, BLOCK};

/// Largest number of injections through a fixed pair for the
/// [`VarMode::InjectionPairs`] route, which is quadratic in that number.
pub const INJECTION_PAIR_LIMIT: usize = 4000;

/// How to evaluate `Var(Δ_{12} t(H, Z))` for `Z` Erdős–Rényi(`a`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VarMode {
    /// Closed form when available, then injection pairs, then enumeration.
    Auto,
    /// `8(n-2)a(1-a)` for the two-star, `36(n-2)a²(1-a²)` for the triangle
    /// and `0` for the edge.
    ClosedForm,
    /// Weighted sum over all `2^N` graphs; needs `N ≤ 24`.
    ExactEnum,
    /// Sums of covariances over pairs of injections that use the pair `(0,1)`.
    InjectionPairs,
    MonteCarlo { samples: usize, seed: u64 },
}

fn closed_form(h: &Motif, n: usize, a: f64) -> Result<f64> {
    let m = (n - 2) as f64;
    match h.kind() {
        MotifKind::Edge => Ok(0.0),
        MotifKind::TwoStar => Ok(8.0 * m * a * (1.0 - a)),
        MotifKind::Triangle => Ok(36.0 * m * a * a * (1.0 - a * a)),
        MotifKind::Other => Err(Error::UnsupportedMotif {
            what: "closed-form variance",
            motif: h.to_string(),
        }),
    }
}

/// Edge sets (linear pair indices, excluding `s`) of every injection of `h`
/// into the complete graph on `n` vertices whose image uses `s`.
pub fn injections_through(h: &Motif, n: usize, s: EdgeIndex) -> Result<Vec<Vec<usize>>> {
    if h.v() > n {
        return Err(Error::Domain(format!("motif does not fit in n = {n}")));
    }
    fn rec(
        h: &Motif,
        n: usize,
        s: usize,
        assign: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        match assign.iter().position(Option::is_none) {
            None => {
                let mut e: Vec<usize> = h
                    .edges()
                    .iter()
                    .map(|&(u, w)| {
                        let (a, b) = (assign[u].unwrap(), assign[w].unwrap());
                        let (a, b) = if a < b { (a, b) } else { (b, a) };
                        crate::graph::linear_unchecked(a, b, n)
                    })
                    .filter(|&t| t != s)
                    .collect();
                e.sort_unstable();
                out.push(e);
            }
            Some(u) => {
                for c in 0..n {
                    if !used[c] {
                        used[c] = true;
                        assign[u] = Some(c);
                        rec(h, n, s, assign, used, out);
                        assign[u] = None;
                        used[c] = false;
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    for &(u, w) in h.edges() {
        for (a, b) in [(s.i, s.j), (s.j, s.i)] {
            let mut assign = vec![None; h.v()];
            let mut used = vec![false; n];
            assign[u] = Some(a);
            assign[w] = Some(b);
            used[a] = true;
            used[b] = true;
            rec(h, n, s.linear, &mut assign, &mut used, &mut out);
        }
    }
    Ok(out)
}

fn union_size(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut k) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        k += 1;
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    k + (a.len() - i) + (b.len() - j)
}

fn injection_pairs(h: &Motif, n: usize, a: f64) -> Result<f64> {
    let s = EdgeIndex::new(0, 1, n)?;
    let inj = injections_through(h, n, s)?;
    if inj.len() > INJECTION_PAIR_LIMIT {
        return Err(Error::Capacity {
            what: "injection-pair variance",
            needed: inj.len(),
            limit: INJECTION_PAIR_LIMIT,
        });
    }
    let total: f64 = inj
        .par_iter()
        .map(|x| {
            inj.iter()
                .map(|y| {
                    let u = union_size(x, y);
                    if u == x.len() + y.len() {
                        0.0
                    } else {
                        a.powi(u as i32) - a.powi((x.len() + y.len()) as i32)
                    }
                })
                .sum::<f64>()
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    Ok(total.max(0.0))
}

fn exact_enum(h: &Motif, n: usize, a: f64) -> Result<f64> {
    let dim = num_pairs(n);
    if dim > MAX_EXACT_DIM {
        return Err(Error::Capacity {
            what: "exact variance enumeration",
            needed: dim,
            limit: MAX_EXACT_DIM,
        });
    }
    let law = ProductLaw::constant(dim, a)?;
    let s = EdgeIndex::new(0, 1, n)?;
    let d = |x: &Config| delta_t(h, &GraphView::new(n, x), s).expect("valid pair") as f64;
    let m1 = exact_product_expectation(&law, d)?;
    let m2 = exact_product_expectation(&law, |x| d(x).powi(2))?;
    Ok((m2 - m1 * m1).max(0.0))
}

fn monte_carlo(h: &Motif, n: usize, a: f64, samples: usize, seed: u64) -> Result<Estimate> {
    if samples < 4 {
        return Err(Error::Domain("Monte Carlo variance needs at least four samples".into()));
    }
    let dim = num_pairs(n);
    let s = EdgeIndex::new(0, 1, n)?;
    let blocks = samples.div_ceil(BLOCK);
    let sums: Vec<[f64; 4]> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = substream(seed, b as u64);
            let mut acc = [0.0; 4];
            let mut x = Config::zeros(dim);
            for _ in 0..BLOCK.min(samples - b * BLOCK) {
                for t in 0..dim {
                    x.set(t, rng.gen::<f64>() < a);
                }
                let v = delta_t(h, &GraphView::new(n, &x), s).expect("valid pair") as f64;
                let mut p = 1.0;
                for slot in acc.iter_mut() {
                    p *= v;
                    *slot += p;
                }
            }
            acc
        })
        .collect();
    let m = samples as f64;
    let raw: Vec<f64> = (0..4).map(|k| sums.iter().map(|r| r[k]).sum::<f64>() / m).collect();
    let mu = raw[0];
    let var_pop = (raw[1] - mu * mu).max(0.0);
    let mu4 = raw[3] - 4.0 * mu * raw[2] + 6.0 * mu * mu * raw[1] - 3.0 * mu.powi(4);
    let var = var_pop * m / (m - 1.0);
    Ok(Estimate {
        value: var,
        se: ((mu4 - var_pop * var_pop).max(0.0) / m).sqrt(),
    })
}

/// `Var(Δ_{12} t(H, Z))` for the unnormalized count, `Z` Erdős–Rényi(`a`) on `n` vertices.
pub fn var_delta_t(h: &Motif, n: usize, a: f64, mode: VarMode) -> Result<Estimate> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::Domain(format!("a = {a} is not a probability")));
    }
    if h.v() > n || n < 2 {
        return Err(Error::Domain(format!("motif does not fit in n = {n}")));
    }
    match mode {
        VarMode::ClosedForm => closed_form(h, n, a).map(Estimate::exact),
        VarMode::ExactEnum => exact_enum(h, n, a).map(Estimate::exact),
        VarMode::InjectionPairs => injection_pairs(h, n, a).map(Estimate::exact),
        VarMode::MonteCarlo { samples, seed } => monte_carlo(h, n, a, samples, seed),
        VarMode::Auto => {
            if h.kind() != MotifKind::Other {
                return closed_form(h, n, a).map(Estimate::exact);
            }
            match injection_pairs(h, n, a) {
                Ok(v) => Ok(Estimate::exact(v)),
                Err(Error::Capacity { .. }) if num_pairs(n) <= 16 => {
                    exact_enum(h, n, a).map(Estimate::exact)
                }
                Err(e) => Err(e),
            }
        }
    }
}

/// `Var(Δ_{12} t_ℓ(Z))` for every term of the model, normalized by the
/// squared falling-product denominator of `t_ℓ`.
pub fn term_variances(m: &ErgmModel, a: f64, mode: VarMode) -> Result<Vec<Estimate>> {
    m.terms()
        .iter()
        .enumerate()
        .map(|(l, (h, _))| {
            let v = var_delta_t(h, m.n(), a, mode)?;
            let d2 = m.denominator(l).powi(2);
            Ok(Estimate {
                value: v.value / d2,
                se: v.se / d2,
            })
        })
        .collect()
}
