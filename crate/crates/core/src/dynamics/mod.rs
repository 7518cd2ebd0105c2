//! Glauber dynamics on `{0,1}^N`: single chains, greedy couplings,
//! influence matrices and contraction rates.
//!
//! Every update consumes exactly two generator outputs, one for the
//! coordinate and one for the uniform, so a chain and either half of a
//! coupling driven by the same stream stay in lockstep.

mod contraction;
mod influence;
mod kernel;

pub use contraction::{
    contraction_rho, influence_cap, ising_rho, region_check, region_motifs, taylor_influence_bound,
    RhoReport,
};
pub use influence::{
    b_matrix, check_b_norm, exact_influence_full, influence_matrix, influence_sum,
    AnalyticInfluence, BNormCheck, InfluenceKind, InfluenceMatrix, EXACT_INFLUENCE_MAX_DIM,
    FULL_INFLUENCE_MAX_DIM,
};
pub use kernel::{stationary_distribution, transition_kernel, KERNEL_MAX_DIM};

use rand::RngCore;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::graph::Config;
use crate::models::{GibbsModel, ProductLaw};
use crate::stats::{substream, Estimate};

/// Uniform index in `0..n` from one 64-bit draw (multiply-high).
#[inline]
fn draw_index(rng: &mut ChaCha8Rng, n: usize) -> usize {
    ((u128::from(rng.next_u64()) * n as u128) >> 64) as usize
}

/// Uniform in `[0,1)` on the 53-bit grid from one 64-bit draw.
#[inline]
fn draw_uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// One chain of the discrete-time Glauber dynamics.
#[derive(Debug, Clone)]
pub struct ChainState {
    pub x: Config,
    pub step: u64,
    rng: ChaCha8Rng,
}

impl ChainState {
    /// Chain started at `x` driven by stream `stream` of `seed`.
    pub fn new(x: Config, seed: u64, stream: u64) -> Self {
        Self::with_rng(x, substream(seed, stream))
    }

    pub fn with_rng(x: Config, rng: ChaCha8Rng) -> Self {
        ChainState { x, step: 0, rng }
    }

    pub fn rng(&self) -> &ChaCha8Rng {
        &self.rng
    }
}

/// What a single update did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Update {
    pub site: usize,
    pub q: f64,
    pub value: bool,
}

/// Resamples a uniformly chosen coordinate from its conditional law.
pub fn glauber_step<M: GibbsModel + ?Sized>(model: &M, state: &mut ChainState) -> Update {
    let site = draw_index(&mut state.rng, model.dim());
    let u = draw_uniform(&mut state.rng);
    let q = model.conditional(&state.x, site);
    let value = u < q;
    state.x.set(site, value);
    state.step += 1;
    Update { site, q, value }
}

/// Two chains updated with a common coordinate and a common uniform.
#[derive(Debug, Clone)]
pub struct CouplingPair {
    pub u: Config,
    pub v: Config,
    pub step: u64,
    rng: ChaCha8Rng,
}

impl CouplingPair {
    /// `u = x^{(s,1)}` and `v = x^{(s,0)}`.
    pub fn adjacent(x: &Config, s: usize, seed: u64, stream: u64) -> Result<Self> {
        if s >= x.len() {
            return domain(format!("coordinate {s} out of range for N = {}", x.len()));
        }
        Ok(Self::with_rng(x.with(s, true), x.with(s, false), substream(seed, stream)))
    }

    pub fn with_rng(u: Config, v: Config, rng: ChaCha8Rng) -> Self {
        assert_eq!(u.len(), v.len(), "coupled states must have equal length");
        CouplingPair { u, v, step: 0, rng }
    }

    pub fn hamming(&self) -> usize {
        self.u.hamming(&self.v)
    }

    pub fn coalesced(&self) -> bool {
        self.u == self.v
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledUpdate {
    pub site: usize,
    pub q_u: f64,
    pub q_v: f64,
    /// The updated coordinate disagrees afterwards.
    pub mismatch: bool,
}

/// Greedy coupled update: both bits are `1` iff the shared uniform falls
/// below the respective conditional probability.
pub fn greedy_coupled_step<M: GibbsModel + ?Sized>(model: &M, pair: &mut CouplingPair) -> CoupledUpdate {
    let site = draw_index(&mut pair.rng, model.dim());
    let w = draw_uniform(&mut pair.rng);
    let q_u = model.conditional(&pair.u, site);
    let q_v = if pair.u == pair.v {
        q_u
    } else {
        model.conditional(&pair.v, site)
    };
    let (bu, bv) = (w < q_u, w < q_v);
    pair.u.set(site, bu);
    pair.v.set(site, bv);
    pair.step += 1;
    CoupledUpdate {
        site,
        q_u,
        q_v,
        mismatch: bu != bv,
    }
}

/// Exact `E d_H` after one greedy coupled step from `(u, v)`.
pub fn expected_hamming_after<M: GibbsModel + ?Sized>(model: &M, u: &Config, v: &Config) -> f64 {
    let dim = model.dim();
    let d = u.hamming(v) as f64;
    let change: f64 = (0..dim)
        .map(|r| {
            let gap = (model.conditional(u, r) - model.conditional(v, r)).abs();
            gap - if u.get(r) != v.get(r) { 1.0 } else { 0.0 }
        })
        .sum();
    d + change / dim as f64
}

/// Monte Carlo `E d_H` after one coupled step from random adjacent pairs.
///
/// Pair `k` draws its start `x ~ init` and coordinate `s` from stream `k`,
/// then runs `reps` independent one-step couplings from it. The standard
/// error is taken over the per-pair means.
pub fn mc_coupled_hamming<M: GibbsModel + ?Sized>(
    model: &M,
    init: &ProductLaw,
    pairs: usize,
    reps: usize,
    seed: u64,
) -> Result<Estimate> {
    let dim = model.dim();
    if init.p().len() != dim {
        return domain("initial law has the wrong dimension");
    }
    if pairs < 2 || reps == 0 {
        return domain("need at least two pairs and one repetition");
    }
    let means: Vec<f64> = (0..pairs)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, k as u64);
            let x = init.sample(&mut rng);
            let s = draw_index(&mut rng, dim);
            let (u0, v0) = (x.with(s, true), x.with(s, false));
            let mut acc = 0usize;
            for _ in 0..reps {
                let mut pair = CouplingPair::with_rng(u0.clone(), v0.clone(), rng.clone());
                greedy_coupled_step(model, &mut pair);
                acc += pair.hamming();
                rng = pair.rng;
            }
            acc as f64 / reps as f64
        })
        .collect();
    let m = pairs as f64;
    let mean = means.iter().sum::<f64>() / m;
    let var = means.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    Ok(Estimate {
        value: mean,
        se: (var / m).sqrt(),
    })
}

/// Default burn-in `⌈10 n² ln n⌉` for a graph on `n` vertices.
pub fn burn_in_steps(n: usize) -> u64 {
    let nf = n.max(2) as f64;
    (10.0 * nf * nf * nf.ln()).ceil() as u64
}

/// Runs `burn` steps, then records `f(x)` every `thin` steps `count` times.
pub fn sample_path<M, F>(
    model: &M,
    state: &mut ChainState,
    burn: u64,
    thin: u64,
    count: usize,
    mut f: F,
) -> Vec<f64>
where
    M: GibbsModel + ?Sized,
    F: FnMut(&Config) -> f64,
{
    for _ in 0..burn {
        glauber_step(model, state);
    }
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        for _ in 0..thin.max(1) {
            glauber_step(model, state);
        }
        out.push(f(&state.x));
    }
    out
}
