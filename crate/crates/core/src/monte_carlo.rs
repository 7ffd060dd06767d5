//! Monte Carlo estimators.
//!
//! [`simulate_exact`] draws the true channel: Rayleigh BS–RIS magnitudes,
//! Jakes-correlated complex Gaussian RIS–port vectors (Cholesky colouring),
//! co-phased magnitude sums per port and best-port selection.
//! [`simulate_decomposition`] samples the Gamma `r + w + t` model directly
//! and serves as a quadrature-free check on the Gamma outage formula.
//!
//! Trials are split into fixed-size batches. Batch `i` draws from ChaCha
//! stream `i` of the run seed, so the estimate depends only on
//! `(seed, trials, BATCH_SIZE)`, not on the number of worker threads.

use crate::blocks::BlockStructure;
use crate::channel::{jakes_coefficient, SystemParams};
use crate::error::{Error, Result};
use crate::gamma_outage::{DecompositionShapes, GammaParams};
use crate::numerics::{cholesky_psd, stream_rng, StreamRng};
use crate::outage::{Method, OutageEstimate};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;

pub const BATCH_SIZE: u64 = 1 << 16;
pub const MIN_TRIALS: u64 = 10_000;

fn batches(trials: u64) -> Vec<(u64, u64)> {
    let count = trials.div_ceil(BATCH_SIZE);
    (0..count)
        .map(|b| (b, BATCH_SIZE.min(trials - b * BATCH_SIZE)))
        .collect()
}

fn check_trials(trials: u64) -> Result<()> {
    if trials < MIN_TRIALS {
        return Err(Error::Usage(format!(
            "at least {MIN_TRIALS} trials required, got {trials}"
        )));
    }
    Ok(())
}

/// Per-trial sampler of the `K` port gains `psi_k` under the exact channel.
#[derive(Debug, Clone)]
pub struct ExactChannelSampler {
    m: usize,
    k: usize,
    /// Row-major lower Cholesky factor of the Jakes matrix.
    chol: Vec<f64>,
    h_scale: f64,
    v_scale: f64,
}

impl ExactChannelSampler {
    pub fn new(params: &SystemParams) -> Result<Self> {
        params.validate()?;
        let k = params.k;
        let sigma = if k == 1 {
            DMatrix::from_element(1, 1, 1.0)
        } else {
            let mut g = DMatrix::zeros(k, k);
            for i in 0..k {
                for j in 0..k {
                    g[(i, j)] = jakes_coefficient(params, i, j)?;
                }
            }
            g
        };
        let l = cholesky_psd(&sigma)?;
        let mut chol = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..=i {
                chol[i * k + j] = l[(i, j)];
            }
        }
        Ok(ExactChannelSampler {
            m: params.m,
            k,
            chol,
            // |CN(0, eps)| = sqrt(eps / 2) * |x + i y|
            h_scale: (params.eps1 / 2.0).sqrt(),
            v_scale: (params.eps2 / 2.0).sqrt(),
        })
    }

    pub fn ports(&self) -> usize {
        self.k
    }

    /// Fills `gains` (length `K`) with one realization of `psi_1..psi_K`.
    /// `scratch` must have length `2K`.
    pub fn sample_into<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        gains: &mut [f64],
        scratch: &mut [f64],
    ) {
        let k = self.k;
        gains.iter_mut().for_each(|g| *g = 0.0);
        let (re, im) = scratch.split_at_mut(k);
        for _ in 0..self.m {
            let hx: f64 = rng.sample(StandardNormal);
            let hy: f64 = rng.sample(StandardNormal);
            let h_mag = self.h_scale * (hx * hx + hy * hy).sqrt();
            for i in 0..k {
                re[i] = rng.sample(StandardNormal);
                im[i] = rng.sample(StandardNormal);
            }
            for i in 0..k {
                let row = &self.chol[i * k..i * k + i + 1];
                let mut vr = 0.0;
                let mut vi = 0.0;
                for (j, l) in row.iter().enumerate() {
                    vr += l * re[j];
                    vi += l * im[j];
                }
                gains[i] += h_mag * self.v_scale * (vr * vr + vi * vi).sqrt();
            }
        }
    }
}

/// Exact-channel outage `P(max_k psi_k <= lambda_th)`.
pub fn simulate_exact(
    params: &SystemParams,
    lambda_th: f64,
    trials: u64,
    seed: u64,
) -> Result<OutageEstimate> {
    check_trials(trials)?;
    let sampler = ExactChannelSampler::new(params)?;
    let hits: u64 = batches(trials)
        .into_par_iter()
        .map(|(stream, n)| {
            let mut rng = stream_rng(seed, stream);
            let mut gains = vec![0.0; sampler.k];
            let mut scratch = vec![0.0; 2 * sampler.k];
            let mut hits = 0u64;
            for _ in 0..n {
                sampler.sample_into(&mut rng, &mut gains, &mut scratch);
                let best = gains.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                hits += u64::from(best <= lambda_th);
            }
            hits
        })
        .sum();
    Ok(OutageEstimate::from_counts(
        Method::McExact,
        hits,
        trials,
        vec![
            ("seed".into(), seed.to_string()),
            ("batch_size".into(), BATCH_SIZE.to_string()),
        ],
    ))
}

/// Sample moments of the port gains.
#[derive(Debug, Clone)]
pub struct GainStatistics {
    pub trials: u64,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    /// Pearson correlation matrix of the port gains.
    pub correlation: DMatrix<f64>,
}

fn moments_from_sums(trials: u64, sum: &[f64], cross: &DMatrix<f64>) -> GainStatistics {
    let n = trials as f64;
    let k = sum.len();
    let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let cov = DMatrix::from_fn(k, k, |i, j| {
        (cross[(i, j)] / n - mean[i] * mean[j]) * n / (n - 1.0)
    });
    let variance: Vec<f64> = (0..k).map(|i| cov[(i, i)]).collect();
    let correlation = DMatrix::from_fn(k, k, |i, j| {
        cov[(i, j)] / (variance[i] * variance[j]).sqrt()
    });
    GainStatistics {
        trials,
        mean,
        variance,
        correlation,
    }
}

fn accumulate_moments<F>(k: usize, trials: u64, seed: u64, draw: F) -> GainStatistics
where
    F: Fn(&mut StreamRng, &mut [f64]) + Sync,
{
    let (sum, cross) = batches(trials)
        .into_par_iter()
        .map(|(stream, n)| {
            let mut rng = stream_rng(seed, stream);
            let mut gains = vec![0.0; k];
            let mut sum = vec![0.0; k];
            let mut cross = DMatrix::<f64>::zeros(k, k);
            for _ in 0..n {
                draw(&mut rng, &mut gains);
                for i in 0..k {
                    sum[i] += gains[i];
                    for j in 0..=i {
                        cross[(i, j)] += gains[i] * gains[j];
                    }
                }
            }
            (sum, cross)
        })
        .reduce(
            || (vec![0.0; k], DMatrix::zeros(k, k)),
            |(mut s1, c1), (s2, c2)| {
                s1.iter_mut().zip(&s2).for_each(|(a, b)| *a += b);
                (s1, c1 + c2)
            },
        );
    let full = DMatrix::from_fn(
        k,
        k,
        |i, j| if j <= i { cross[(i, j)] } else { cross[(j, i)] },
    );
    moments_from_sums(trials, &sum, &full)
}

/// Empirical mean, variance and correlation of the exact port gains.
pub fn exact_gain_statistics(
    params: &SystemParams,
    trials: u64,
    seed: u64,
) -> Result<GainStatistics> {
    check_trials(trials)?;
    let sampler = ExactChannelSampler::new(params)?;
    let k = sampler.k;
    Ok(accumulate_moments(k, trials, seed, |rng, gains| {
        let mut scratch = [0.0; 128];
        if 2 * k <= scratch.len() {
            sampler.sample_into(rng, gains, &mut scratch[..2 * k]);
        } else {
            let mut scratch = vec![0.0; 2 * k];
            sampler.sample_into(rng, gains, &mut scratch);
        }
    }))
}

/// Sampler of the Gamma decomposition `r_{l,d} + w_d + t`.
#[derive(Debug, Clone)]
pub struct DecompositionSampler {
    sizes: Vec<usize>,
    t: Option<Gamma<f64>>,
    w: Vec<Option<Gamma<f64>>>,
    r: Vec<Option<Gamma<f64>>>,
}

fn gamma_or_zero(shape: f64, scale: f64) -> Result<Option<Gamma<f64>>> {
    if shape <= 0.0 {
        return Ok(None);
    }
    Gamma::new(shape, scale)
        .map(Some)
        .map_err(|e| Error::domain("gamma sampler", e.to_string()))
}

fn draw<R: Rng + ?Sized>(dist: &Option<Gamma<f64>>, rng: &mut R) -> f64 {
    dist.as_ref().map_or(0.0, |d| d.sample(rng))
}

impl DecompositionSampler {
    pub fn new(gp: &GammaParams, structure: &BlockStructure) -> Result<Self> {
        structure.validate()?;
        let shapes = DecompositionShapes::new(gp, structure);
        let mut w = Vec::new();
        let mut r = Vec::new();
        for b in &shapes.blocks {
            w.push(gamma_or_zero(b.alpha_w, gp.scale)?);
            r.push(gamma_or_zero(b.alpha_r, gp.scale)?);
        }
        Ok(DecompositionSampler {
            sizes: structure.sizes.clone(),
            t: gamma_or_zero(shapes.alpha_t, gp.scale)?,
            w,
            r,
        })
    }

    pub fn ports(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// One realization of all `K` approximate port gains, block by block.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, gains: &mut [f64]) {
        let t = draw(&self.t, rng);
        let mut port = 0;
        for (d, &size) in self.sizes.iter().enumerate() {
            let w = draw(&self.w[d], rng);
            for _ in 0..size {
                gains[port] = t + w + draw(&self.r[d], rng);
                port += 1;
            }
        }
    }
}

/// Outage of the Gamma decomposition model by direct sampling.
pub fn simulate_decomposition(
    gp: &GammaParams,
    structure: &BlockStructure,
    lambda_th: f64,
    trials: u64,
    seed: u64,
) -> Result<OutageEstimate> {
    check_trials(trials)?;
    let sampler = DecompositionSampler::new(gp, structure)?;
    let k = sampler.ports();
    let hits: u64 = batches(trials)
        .into_par_iter()
        .map(|(stream, n)| {
            let mut rng = stream_rng(seed, stream);
            let mut gains = vec![0.0; k];
            let mut hits = 0u64;
            for _ in 0..n {
                sampler.sample_into(&mut rng, &mut gains);
                let best = gains.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                hits += u64::from(best <= lambda_th);
            }
            hits
        })
        .sum();
    Ok(OutageEstimate::from_counts(
        Method::McDecomposition,
        hits,
        trials,
        vec![("seed".into(), seed.to_string())],
    ))
}

/// Empirical moments of the decomposition samples.
pub fn decomposition_statistics(
    gp: &GammaParams,
    structure: &BlockStructure,
    trials: u64,
    seed: u64,
) -> Result<GainStatistics> {
    check_trials(trials)?;
    let sampler = DecompositionSampler::new(gp, structure)?;
    Ok(accumulate_moments(
        sampler.ports(),
        trials,
        seed,
        |rng, gains| sampler.sample_into(rng, gains),
    ))
}
