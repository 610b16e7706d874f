//! Seeded Monte-Carlo simulator of the equivalent classical channel,
//! providing an empirical MSE estimate independent of the closed-form
//! expressions.
//!
//! Samples are generated in fixed-size batches, each driven by a stream
//! cipher RNG keyed by (seed, batch index), so results are bit-identical
//! regardless of how batches are scheduled across threads.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{QiccError, Result};
use crate::estimator::{Allocation, Scenario};

const BATCH: usize = 8192;

/// Symbol distribution for the transmitted analogue and digital symbols.
/// Both are zero-mean and unit-power; the MSE depends only on second
/// moments, so the two choices must agree statistically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    /// Circularly symmetric complex Gaussian, CN(0, 1).
    CircularGaussian,
    /// Unit-magnitude symbol with uniformly random phase.
    UniformPhaseQpskLike,
}

#[derive(Debug, Clone, Copy)]
pub struct SymbolModel {
    pub distribution: Distribution,
    pub seed: u64,
}

/// Empirical MSE with its standard error.
#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    pub mse_hat: f64,
    pub std_err: f64,
    pub n_samples: usize,
}

#[derive(Clone, Copy)]
struct Complex {
    re: f64,
    im: f64,
}

impl Complex {
    fn zero() -> Self {
        Self { re: 0.0, im: 0.0 }
    }

    fn add_scaled(&mut self, scale: f64, other: Complex) {
        self.re += scale * other.re;
        self.im += scale * other.im;
    }

    fn norm_sq(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

fn draw_symbol(rng: &mut ChaCha8Rng, dist: Distribution) -> Complex {
    match dist {
        Distribution::CircularGaussian => {
            // Box-Muller, per-quadrature variance 1/2
            let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = (-u1.ln()).sqrt();
            Complex { re: r * u2.cos(), im: r * u2.sin() }
        }
        Distribution::UniformPhaseQpskLike => {
            let phase = std::f64::consts::FRAC_PI_2 * rng.gen_range(0u32..4) as f64
                + std::f64::consts::FRAC_PI_4;
            Complex { re: phase.cos(), im: phase.sin() }
        }
    }
}

fn draw_noise(rng: &mut ChaCha8Rng, n0: f64) -> Complex {
    // total variance N0, split equally per quadrature
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (n0 * -u1.ln()).sqrt();
    Complex { re: r * u2.cos(), im: r * u2.sin() }
}

fn batch_rng(seed: u64, batch_idx: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&batch_idx.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Empirical MSE of the linear estimate over `n_samples` channel draws.
///
/// Each draw forms y = Σ sqrt(η_k g_k) s_k + Σ sqrt(η_{K+m} P_m) d_m + z and
/// accumulates |S − h·y|² with S = Σ s_k.
pub fn simulate_mse(
    scenario: &Scenario,
    alloc: &Allocation,
    comm_powers: &[f64],
    model: &SymbolModel,
    n_samples: usize,
) -> Result<McEstimate> {
    alloc.validate(scenario)?;
    if n_samples < 1 {
        return Err(QiccError::InvalidArgument("n_samples must be >= 1".into()));
    }
    if comm_powers.len() != scenario.m {
        return Err(QiccError::InvalidArgument(format!(
            "expected {} communication powers, got {}",
            scenario.m,
            comm_powers.len()
        )));
    }
    if comm_powers.iter().any(|&p| p < 0.0 || p > scenario.pt + 1e-9) {
        return Err(QiccError::InvalidArgument(
            "communication powers must lie in [0, Pt]".into(),
        ));
    }

    let oac_gains: Vec<f64> = scenario
        .eta_oac()
        .iter()
        .zip(&alloc.g)
        .map(|(e, g)| (e * g).sqrt())
        .collect();
    let comm_gains: Vec<f64> = scenario
        .eta_comm()
        .iter()
        .zip(comm_powers)
        .map(|(e, p)| (e * p).sqrt())
        .collect();
    let (hr, hi) = alloc.h;

    let n_batches = n_samples.div_ceil(BATCH);
    // (sum, sum of squares) per batch; reduced in batch order so the result
    // does not depend on scheduling.
    let stats: Vec<(f64, f64)> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = batch_rng(model.seed, b as u64);
            let count = BATCH.min(n_samples - b * BATCH);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..count {
                let mut y = Complex::zero();
                let mut target = Complex::zero();
                for &gain in &oac_gains {
                    let s = draw_symbol(&mut rng, model.distribution);
                    y.add_scaled(gain, s);
                    target.add_scaled(1.0, s);
                }
                for &gain in &comm_gains {
                    let d = draw_symbol(&mut rng, model.distribution);
                    y.add_scaled(gain, d);
                }
                y.add_scaled(1.0, draw_noise(&mut rng, scenario.n0));
                let est = Complex {
                    re: hr * y.re - hi * y.im,
                    im: hr * y.im + hi * y.re,
                };
                let err = Complex {
                    re: target.re - est.re,
                    im: target.im - est.im,
                };
                let e = err.norm_sq();
                sum += e;
                sum_sq += e * e;
            }
            (sum, sum_sq)
        })
        .collect();

    let (sum, sum_sq) = stats
        .iter()
        .fold((0.0, 0.0), |(s, q), &(bs, bq)| (s + bs, q + bq));
    let n = n_samples as f64;
    let mean = sum / n;
    let var = ((sum_sq / n - mean * mean).max(0.0)) * n / (n - 1.0).max(1.0);
    Ok(McEstimate {
        mse_hat: mean,
        std_err: (var / n).sqrt(),
        n_samples,
    })
}
