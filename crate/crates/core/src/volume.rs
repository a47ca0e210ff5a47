//! Monte Carlo estimate of the volume `v_g` of the normalized region `V_g`.
//!
//! Points are drawn uniformly from `prod [-binom(2g, i), binom(2g, i)]`
//! (optionally scaled) and tested with the floating-point root classifier
//! on `h` for `q = 1`. Boundary-uncertain points count as hits. Sample `k`
//! uses its own slice of a ChaCha8 stream, so results depend only on the
//! seed and sample count, never on the thread count.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::error::{Result, WeilError};
use crate::numeric::{self, NumericVerdict, DEFAULT_TOLERANCE};
use crate::weil;

pub const GENERATOR: &str = "chacha8-wordpos/1";

const BLOCK: u64 = 1 << 14;

/// A point `(b_1, ..., b_g)` of normalized coefficient space.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedPoint {
    pub b: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VolumeEstimate {
    pub g: usize,
    pub samples: u64,
    pub hits: u64,
    pub mean: f64,
    pub std_err: f64,
    pub seed: u64,
    pub box_volume: f64,
    pub box_scale: f64,
    pub generator: String,
}

impl VolumeEstimate {
    /// A known volume with zero error, e.g. `v_1 = 4`.
    pub fn exact(g: usize, volume: f64) -> Self {
        Self {
            g,
            samples: 0,
            hits: 0,
            mean: volume,
            std_err: 0.0,
            seed: 0,
            box_volume: 0.0,
            box_scale: 1.0,
            generator: "exact".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VolumeOptions {
    /// Multiplies every half-width of the sampling box.
    pub box_scale: f64,
    /// Worker threads; `0` uses the ambient rayon pool.
    pub jobs: usize,
}

impl Default for VolumeOptions {
    fn default() -> Self {
        Self {
            box_scale: 1.0,
            jobs: 0,
        }
    }
}

/// Normalized real Weil polynomial family, `c_k` at `q = 1`, as floats.
struct Family {
    g: usize,
    c: Vec<Vec<f64>>,
}

impl Family {
    fn new(g: usize) -> Self {
        let c = weil::chebyshev_family(g, &BigInt::one())
            .iter()
            .map(|p| {
                p.coefficients()
                    .iter()
                    .map(|x| x.to_f64().expect("small"))
                    .collect()
            })
            .collect();
        Self { g, c }
    }

    fn h(&self, b: &[f64]) -> Vec<f64> {
        let g = self.g;
        let mut h = self.c[g].clone();
        for (i, &bi) in b.iter().enumerate().take(g - 1) {
            for (k, &c) in self.c[g - 1 - i].iter().enumerate() {
                h[k] += bi * c;
            }
        }
        h[0] += b[g - 1];
        h
    }

    fn contains(&self, b: &[f64]) -> Result<bool> {
        let approx = numeric::numeric_roots_f64(&self.h(b))?;
        Ok(numeric::classify_roots(&approx, 2.0, DEFAULT_TOLERANCE) != NumericVerdict::NotMember)
    }
}

/// Whether `b` lies in `V_g` (roots of `h` for `q = 1` all in `[-2, 2]`).
/// Points too close to the boundary to decide count as inside.
pub fn is_in_vg(point: &NormalizedPoint) -> Result<bool> {
    if point.b.is_empty() {
        return Err(WeilError::InvalidDimension);
    }
    Family::new(point.b.len()).contains(&point.b)
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn half_widths(g: usize, scale: f64) -> Vec<f64> {
    (1..=g)
        .map(|i| scale * binomial(2 * g as u64, i as u64))
        .collect()
}

/// The `index`-th sample point of the stream for `seed`.
pub fn sample_point(g: usize, seed: u64, index: u64, box_scale: f64) -> NormalizedPoint {
    let mut rng = stream(seed);
    sample_at(&mut rng, &half_widths(g, box_scale), index)
}

fn stream(seed: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn sample_at(rng: &mut ChaCha8Rng, widths: &[f64], index: u64) -> NormalizedPoint {
    // two 32-bit words per coordinate
    rng.set_word_pos(2 * widths.len() as u128 * index as u128);
    let b = widths
        .iter()
        .map(|&w| {
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            -w + 2.0 * w * u
        })
        .collect();
    NormalizedPoint { b }
}

pub fn estimate_volume(g: usize, samples: u64, seed: u64) -> Result<VolumeEstimate> {
    estimate_volume_with(g, samples, seed, VolumeOptions::default())
}

pub fn estimate_volume_with(
    g: usize,
    samples: u64,
    seed: u64,
    options: VolumeOptions,
) -> Result<VolumeEstimate> {
    if g == 0 {
        return Err(WeilError::InvalidDimension);
    }
    if samples == 0 {
        return Err(WeilError::InvalidSamples);
    }
    if !(options.box_scale.is_finite() && options.box_scale > 0.0) {
        return Err(WeilError::InvalidBoxScale);
    }
    let widths = half_widths(g, options.box_scale);
    let family = Family::new(g);
    let blocks: Vec<(u64, u64)> = (0..samples.div_ceil(BLOCK))
        .map(|k| (k * BLOCK, ((k + 1) * BLOCK).min(samples)))
        .collect();
    let work = || -> Result<u64> {
        blocks
            .par_iter()
            .map(|&(lo, hi)| {
                let mut rng = stream(seed);
                let mut hits = 0;
                for index in lo..hi {
                    let point = sample_at(&mut rng, &widths, index);
                    if family.contains(&point.b)? {
                        hits += 1;
                    }
                }
                Ok(hits)
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))
    };
    let hits = match options.jobs {
        0 => work()?,
        n => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(work)?,
    };
    let box_volume: f64 = widths.iter().map(|w| 2.0 * w).product();
    let f = hits as f64 / samples as f64;
    Ok(VolumeEstimate {
        g,
        samples,
        hits,
        mean: box_volume * f,
        std_err: box_volume * (f * (1.0 - f) / samples as f64).sqrt(),
        seed,
        box_volume,
        box_scale: options.box_scale,
        generator: GENERATOR.into(),
    })
}
