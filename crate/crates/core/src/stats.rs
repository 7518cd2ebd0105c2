//! Seeded substreams and order-stable parallel reductions.
//!
//! Work is cut into fixed blocks, each with its own ChaCha stream derived
//! from the master seed, and block results are combined in block order. The
//! output therefore does not depend on the number of threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Config;
use crate::models::{ProductLaw, MAX_EXACT_DIM};

/// Samples per Monte Carlo block.
pub const BLOCK: usize = 1024;

/// Two-sided 99% standard normal quantile.
pub const Z99: f64 = 2.575_829_303_548_901;

/// A point estimate with its standard error (zero for exact values).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, se: 0.0 }
    }

    /// 99% normal-approximation half-width.
    pub fn half_width(&self) -> f64 {
        Z99 * self.se
    }
}

/// Stream `stream` of the ChaCha8 generator seeded with `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `Σ_{mask < 2^dim} f(mask)`, summed in fixed chunks.
pub(crate) fn ordered_mask_sum<F>(dim: usize, f: F) -> f64
where
    F: Fn(u64) -> f64 + Sync,
{
    const CHUNK: u64 = 4096;
    let total = 1u64 << dim;
    let chunks = total.div_ceil(CHUNK);
    let parts: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(total);
            (lo..hi).map(&f).sum()
        })
        .collect();
    parts.iter().sum()
}

/// `E f(Y)` under a product law, by enumeration of `{0,1}^N`.
pub fn exact_product_expectation<F>(law: &ProductLaw, f: F) -> Result<f64>
where
    F: Fn(&Config) -> f64 + Sync,
{
    let dim = law.p().len();
    if dim > MAX_EXACT_DIM {
        return Err(Error::Capacity {
            what: "exact enumeration",
            needed: dim,
            limit: MAX_EXACT_DIM,
        });
    }
    Ok(ordered_mask_sum(dim, |mask| {
        let x = Config::from_mask(dim, mask);
        let w = law.probability(&x);
        if w == 0.0 {
            0.0
        } else {
            w * f(&x)
        }
    }))
}

/// Mean of `samples` draws of `f`, each block drawing from its own substream.
pub fn mc_mean<F>(samples: usize, seed: u64, f: F) -> Result<Estimate>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    if samples < 2 {
        return Err(Error::Domain("Monte Carlo needs at least two samples".into()));
    }
    let blocks = samples.div_ceil(BLOCK);
    let parts: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = substream(seed, b as u64);
            let count = BLOCK.min(samples - b * BLOCK);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for _ in 0..count {
                let v = f(&mut rng);
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = parts
        .iter()
        .fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    let m = samples as f64;
    let mean = s / m;
    let var = ((s2 - m * mean * mean) / (m - 1.0)).max(0.0);
    Ok(Estimate {
        value: mean,
        se: (var / m).sqrt(),
    })
}

/// Batch-means estimate from a single correlated sequence: the sequence is
/// cut into `batches` equal batches and the standard error is taken from
/// the spread of their means.
pub fn batch_means(values: &[f64], batches: usize) -> Result<Estimate> {
    if batches < 2 || values.len() < batches {
        return Err(Error::Domain(format!(
            "{} values cannot form {batches} batches",
            values.len()
        )));
    }
    let size = values.len() / batches;
    let means: Vec<f64> = (0..batches)
        .map(|b| values[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let mean = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (batches as f64 - 1.0);
    Ok(Estimate {
        value: mean,
        se: (var / batches as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn exact_expectation_of_a_coordinate() {
        let law = ProductLaw::new(vec![0.2, 0.7, 0.5]).unwrap();
        let e = exact_product_expectation(&law, |x| f64::from(u8::from(x.get(1)))).unwrap();
        assert!((e - 0.7).abs() < 1e-15);
        let ones = exact_product_expectation(&law, |x| x.count_ones() as f64).unwrap();
        assert!((ones - 1.4).abs() < 1e-14);
    }

    #[test]
    fn monte_carlo_is_reproducible_and_thread_independent() {
        let f = |r: &mut ChaCha8Rng| r.gen::<f64>();
        let a = mc_mean(5000, 9, f).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| mc_mean(5000, 9, f).unwrap());
        assert_eq!(a, b);
        assert!((a.value - 0.5).abs() < 4.0 * a.se);
        assert!((a.se - (1.0f64 / 12.0 / 5000.0).sqrt()).abs() < 1e-4);
    }

    #[test]
    fn batch_means_of_iid_values() {
        let mut rng = substream(3, 0);
        let v: Vec<f64> = (0..30_000).map(|_| rng.gen::<f64>()).collect();
        let e = batch_means(&v, 30).unwrap();
        assert!((e.value - 0.5).abs() < 4.0 * e.se);
        assert!(batch_means(&v[..10], 30).is_err());
    }
}
