//! Denoising diffusion over latent vectors: the forward noising chain,
//! the deterministic reverse step, a Bayes-optimal noise predictor for
//! Gaussian data, and channel denoising that matches the channel noise
//! level to a diffusion timestep.

use rand::prelude::*;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::channel::ReceivedLatent;

use super::CodecError;

/// Variance schedule: beta_t for t = 1..=T, with alpha_t = 1 - beta_t and
/// alpha_bar_t the running product.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSchedule {
    betas: Vec<f64>,
    alphas: Vec<f64>,
    alpha_bars: Vec<f64>,
}

impl NoiseSchedule {
    /// Linear beta schedule; the standard configuration is
    /// `NoiseSchedule::linear(100, 1e-4, 0.02)`.
    pub fn linear(t_max: usize, beta_min: f64, beta_max: f64) -> Result<Self, CodecError> {
        if t_max == 0 || beta_min <= 0.0 || beta_max >= 1.0 || beta_min > beta_max {
            return Err(CodecError::InvalidDistribution(format!(
                "invalid beta schedule ({t_max} steps, {beta_min}..{beta_max})"
            )));
        }
        let betas = (0..t_max)
            .map(|i| {
                if t_max == 1 {
                    beta_min
                } else {
                    beta_min + (beta_max - beta_min) * i as f64 / (t_max - 1) as f64
                }
            })
            .collect();
        Ok(Self::from_betas_unchecked(betas))
    }

    /// Builds a schedule from explicit betas in `[0, 1)`. Zero betas give
    /// degenerate (noiseless) steps, useful for edge-case checks.
    pub fn from_betas(betas: Vec<f64>) -> Result<Self, CodecError> {
        if betas.is_empty() || betas.iter().any(|b| !(0.0..1.0).contains(b)) {
            return Err(CodecError::InvalidDistribution(
                "betas must lie in [0, 1)".into(),
            ));
        }
        Ok(Self::from_betas_unchecked(betas))
    }

    fn from_betas_unchecked(betas: Vec<f64>) -> Self {
        let alphas: Vec<f64> = betas.iter().map(|b| 1.0 - b).collect();
        let mut alpha_bars = Vec::with_capacity(betas.len());
        let mut product = 1.0;
        for a in &alphas {
            product *= a;
            alpha_bars.push(product);
        }
        Self {
            betas,
            alphas,
            alpha_bars,
        }
    }

    pub fn t_max(&self) -> usize {
        self.betas.len()
    }

    pub fn beta(&self, t: usize) -> f64 {
        self.betas[t - 1]
    }

    pub fn alpha(&self, t: usize) -> f64 {
        self.alphas[t - 1]
    }

    pub fn alpha_bar(&self, t: usize) -> f64 {
        self.alpha_bars[t - 1]
    }

    fn check_t(&self, t: usize) -> Result<(), CodecError> {
        if t == 0 || t > self.t_max() {
            return Err(CodecError::TimestepOutOfRange {
                t,
                max: self.t_max(),
            });
        }
        Ok(())
    }
}

impl Default for NoiseSchedule {
    fn default() -> Self {
        Self::linear(100, 1e-4, 0.02).expect("standard schedule is valid")
    }
}

fn gaussian_vec(dim: usize, rng: &mut ChaCha20Rng) -> Vec<f64> {
    (0..dim).map(|_| rng.sample(StandardNormal)).collect()
}

/// One forward step: x_t = sqrt(alpha_t) x_{t-1} + sqrt(1 - alpha_t) eps.
pub fn ddpm_forward_step(
    x_prev: &[f64],
    t: usize,
    schedule: &NoiseSchedule,
    seed: u64,
) -> Result<Vec<f64>, CodecError> {
    schedule.check_t(t)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let a = schedule.alpha(t);
    Ok(x_prev
        .iter()
        .zip(gaussian_vec(x_prev.len(), &mut rng))
        .map(|(x, e)| a.sqrt() * x + (1.0 - a).sqrt() * e)
        .collect())
}

/// Closed-form composition of the forward chain:
/// x_t = sqrt(alpha_bar_t) x_0 + sqrt(1 - alpha_bar_t) eps.
pub fn ddpm_forward_marginal(
    x0: &[f64],
    t: usize,
    schedule: &NoiseSchedule,
    seed: u64,
) -> Result<Vec<f64>, CodecError> {
    schedule.check_t(t)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let ab = schedule.alpha_bar(t);
    Ok(x0
        .iter()
        .zip(gaussian_vec(x0.len(), &mut rng))
        .map(|(x, e)| ab.sqrt() * x + (1.0 - ab).sqrt() * e)
        .collect())
}

/// Contract for the noise estimate consumed by the reverse step.
pub trait EpsilonPredictor {
    /// Predicted noise component of `x_t`; must preserve the dimension.
    fn predict(&self, x_t: &[f64], t: usize) -> Vec<f64>;
}

/// Deterministic reverse step:
/// x_{t-1} = (x_t - (1 - alpha_t) / sqrt(1 - alpha_bar_t) eps_hat) / sqrt(alpha_t).
pub fn ddpm_reverse_step(
    x_t: &[f64],
    t: usize,
    schedule: &NoiseSchedule,
    predictor: &dyn EpsilonPredictor,
) -> Result<Vec<f64>, CodecError> {
    schedule.check_t(t)?;
    let a = schedule.alpha(t);
    let ab = schedule.alpha_bar(t);
    let eps_hat = predictor.predict(x_t, t);
    if eps_hat.len() != x_t.len() {
        return Err(CodecError::DimensionMismatch {
            expected: x_t.len(),
            found: eps_hat.len(),
        });
    }
    let coeff = if ab < 1.0 {
        (1.0 - a) / (1.0 - ab).sqrt()
    } else {
        0.0
    };
    Ok(x_t
        .iter()
        .zip(&eps_hat)
        .map(|(x, e)| (x - coeff * e) / a.sqrt())
        .collect())
}

/// Bayes-optimal noise predictor when x_0 ~ N(mean, var) per dimension:
/// the conditional expectation E[eps | x_t] under the forward marginal.
#[derive(Debug, Clone)]
pub struct GaussianEpsPredictor {
    mean: Vec<f64>,
    var: Vec<f64>,
    schedule: NoiseSchedule,
}

/// Builds the predictor for per-dimension data statistics (mean, var).
pub fn gaussian_eps_predictor(
    mean: &[f64],
    var: &[f64],
    schedule: &NoiseSchedule,
) -> GaussianEpsPredictor {
    debug_assert_eq!(mean.len(), var.len());
    GaussianEpsPredictor {
        mean: mean.to_vec(),
        var: var.to_vec(),
        schedule: schedule.clone(),
    }
}

impl EpsilonPredictor for GaussianEpsPredictor {
    fn predict(&self, x_t: &[f64], t: usize) -> Vec<f64> {
        let ab = self.schedule.alpha_bar(t);
        x_t.iter()
            .enumerate()
            .map(|(i, x)| {
                let denom = (ab * self.var[i] + (1.0 - ab)).max(1e-12);
                (1.0 - ab).sqrt() * (x - ab.sqrt() * self.mean[i]) / denom
            })
            .collect()
    }
}

/// Timestep whose cumulative noise level (1 - alpha_bar_t) / alpha_bar_t
/// best matches the effective channel noise variance.
pub fn select_timestep(schedule: &NoiseSchedule, sigma_eff_sq: f64) -> usize {
    let mut best_t = 1;
    let mut best_gap = f64::INFINITY;
    for t in 1..=schedule.t_max() {
        let ab = schedule.alpha_bar(t);
        let level = (1.0 - ab) / ab;
        let gap = (level - sigma_eff_sq).abs();
        if gap < best_gap {
            best_gap = gap;
            best_t = t;
        }
    }
    best_t
}

/// Cleans a received latent by treating channel noise as diffusion noise:
/// pick the matching timestep, rescale the observation onto the forward
/// trajectory, and run reverse steps down to t = 1.
///
/// When the channel is cleaner than even the first diffusion step there is
/// nothing the chain can remove, so the latent passes through unchanged.
pub fn channel_denoise(
    received: &ReceivedLatent,
    n0: f64,
    latent_mean: &[f64],
    latent_var: &[f64],
    schedule: &NoiseSchedule,
) -> Result<Vec<f64>, CodecError> {
    if received.values.len() != latent_mean.len() || latent_mean.len() != latent_var.len() {
        return Err(CodecError::DimensionMismatch {
            expected: received.values.len(),
            found: latent_mean.len(),
        });
    }
    let sigma_eff_sq = received.gain * received.gain * n0 / 2.0;
    let first_level = (1.0 - schedule.alpha_bar(1)) / schedule.alpha_bar(1);
    if sigma_eff_sq <= first_level / 2.0 {
        return Ok(received.values.clone());
    }

    let t_star = select_timestep(schedule, sigma_eff_sq);
    let predictor = gaussian_eps_predictor(latent_mean, latent_var, schedule);
    let ab_star = schedule.alpha_bar(t_star);
    let mut x: Vec<f64> = received.values.iter().map(|v| ab_star.sqrt() * v).collect();
    for t in (1..=t_star).rev() {
        x = ddpm_reverse_step(&x, t, schedule, &predictor)?;
    }
    Ok(x)
}
