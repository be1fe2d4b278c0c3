//! Variational autoencoder with affine encoder/decoder over the one-hot
//! attribute space. Gradients are analytic, so training needs no autodiff
//! and every derivative can be checked against finite differences.

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::corpus::{decode_onehot, PersonAttributes, GROUP_SIZES, ONEHOT_DIM};

use super::CodecError;

const LOGVAR_CLAMP: f64 = 10.0;

/// Affine encoder producing (mu, logvar) and affine decoder producing
/// per-group logits.
#[derive(Debug, Clone, PartialEq)]
pub struct VaeParams {
    d_z: usize,
    /// (2 d_z) x 30: rows 0..d_z feed mu, rows d_z..2 d_z feed logvar.
    enc_w: DMatrix<f64>,
    enc_b: DVector<f64>,
    /// 30 x d_z.
    dec_w: DMatrix<f64>,
    dec_b: DVector<f64>,
}

/// Training hyperparameters for full-batch gradient descent.
#[derive(Debug, Clone, Copy)]
pub struct VaeTrainConfig {
    pub lr: f64,
    pub epochs: usize,
    pub seed: u64,
    pub init_scale: f64,
}

impl Default for VaeTrainConfig {
    fn default() -> Self {
        Self {
            lr: 0.05,
            epochs: 2000,
            seed: 0,
            init_scale: 1.0,
        }
    }
}

/// Closed-form KL(N(mu, diag sigma^2) || N(0, I)).
pub fn kl_gaussian(mu: &[f64], logvar: &[f64]) -> f64 {
    debug_assert_eq!(mu.len(), logvar.len());
    0.5 * mu
        .iter()
        .zip(logvar)
        .map(|(m, lv)| m * m + lv.exp() - 1.0 - lv)
        .sum::<f64>()
}

/// z = mu + eps * sigma with eps ~ N(0, I), sigma = exp(logvar / 2).
pub fn reparameterize(mu: &[f64], logvar: &[f64], seed: u64) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    mu.iter()
        .zip(logvar)
        .map(|(m, lv)| {
            let eps: f64 = rng.sample(StandardNormal);
            m + eps * (lv / 2.0).exp()
        })
        .collect()
}

impl VaeParams {
    pub fn d_z(&self) -> usize {
        self.d_z
    }

    fn random(d_z: usize, scale: f64, rng: &mut ChaCha20Rng) -> Self {
        let mut draw = |rows: usize, cols: usize| {
            DMatrix::from_fn(rows, cols, |_, _| {
                let g: f64 = rng.sample(StandardNormal);
                g * scale
            })
        };
        let enc_w = draw(2 * d_z, ONEHOT_DIM);
        let dec_w = draw(ONEHOT_DIM, d_z);
        Self {
            d_z,
            enc_w,
            enc_b: DVector::zeros(2 * d_z),
            dec_w,
            dec_b: DVector::zeros(ONEHOT_DIM),
        }
    }

    /// Flat parameter vector: enc_w row-major, enc_b, dec_w row-major,
    /// dec_b. Used by the finite-difference checks.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut flat = Vec::new();
        for r in 0..self.enc_w.nrows() {
            for c in 0..self.enc_w.ncols() {
                flat.push(self.enc_w[(r, c)]);
            }
        }
        flat.extend(self.enc_b.iter());
        for r in 0..self.dec_w.nrows() {
            for c in 0..self.dec_w.ncols() {
                flat.push(self.dec_w[(r, c)]);
            }
        }
        flat.extend(self.dec_b.iter());
        flat
    }

    pub fn from_flat(d_z: usize, flat: &[f64]) -> Result<Self, CodecError> {
        let expected = Self::param_count(d_z);
        if flat.len() != expected {
            return Err(CodecError::DimensionMismatch {
                expected,
                found: flat.len(),
            });
        }
        let mut it = flat.iter().copied();
        let enc_w =
            DMatrix::from_row_iterator(2 * d_z, ONEHOT_DIM, it.by_ref().take(2 * d_z * ONEHOT_DIM));
        let enc_b = DVector::from_iterator(2 * d_z, it.by_ref().take(2 * d_z));
        let dec_w =
            DMatrix::from_row_iterator(ONEHOT_DIM, d_z, it.by_ref().take(ONEHOT_DIM * d_z));
        let dec_b = DVector::from_iterator(ONEHOT_DIM, it.by_ref().take(ONEHOT_DIM));
        Ok(Self {
            d_z,
            enc_w,
            enc_b,
            dec_w,
            dec_b,
        })
    }

    pub fn param_count(d_z: usize) -> usize {
        2 * d_z * ONEHOT_DIM + 2 * d_z + ONEHOT_DIM * d_z + ONEHOT_DIM
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), CodecError> {
        let file = VaeParamsFile {
            d_z: self.d_z,
            enc_w: matrix_rows(&self.enc_w),
            enc_b: self.enc_b.iter().copied().collect(),
            dec_w: matrix_rows(&self.dec_w),
            dec_b: self.dec_b.iter().copied().collect(),
        };
        std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CodecError> {
        let file: VaeParamsFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let enc_w = rows_to_matrix(&file.enc_w, 2 * file.d_z, ONEHOT_DIM)?;
        let dec_w = rows_to_matrix(&file.dec_w, ONEHOT_DIM, file.d_z)?;
        Ok(Self {
            d_z: file.d_z,
            enc_w,
            enc_b: DVector::from_vec(file.enc_b),
            dec_w,
            dec_b: DVector::from_vec(file.dec_b),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct VaeParamsFile {
    d_z: usize,
    enc_w: Vec<Vec<f64>>,
    enc_b: Vec<f64>,
    dec_w: Vec<Vec<f64>>,
    dec_b: Vec<f64>,
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

fn rows_to_matrix(rows: &[Vec<f64>], nrows: usize, ncols: usize) -> Result<DMatrix<f64>, CodecError> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(CodecError::DimensionMismatch {
            expected: nrows * ncols,
            found: rows.iter().map(Vec::len).sum(),
        });
    }
    Ok(DMatrix::from_fn(nrows, ncols, |r, c| rows[r][c]))
}

/// Posterior parameters for one input, logvar clamped to +-10.
pub fn vae_encode(params: &VaeParams, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>), CodecError> {
    if x.len() != ONEHOT_DIM {
        return Err(CodecError::DimensionMismatch {
            expected: ONEHOT_DIM,
            found: x.len(),
        });
    }
    let h = &params.enc_w * DVector::from_column_slice(x) + &params.enc_b;
    let mu = h.rows(0, params.d_z).iter().copied().collect();
    let logvar = h
        .rows(params.d_z, params.d_z)
        .iter()
        .map(|lv| lv.clamp(-LOGVAR_CLAMP, LOGVAR_CLAMP))
        .collect();
    Ok((mu, logvar))
}

/// Decoder logits for a (possibly noisy) latent.
pub fn vae_logits(params: &VaeParams, z: &[f64]) -> Result<Vec<f64>, CodecError> {
    if z.len() != params.d_z {
        return Err(CodecError::DimensionMismatch {
            expected: params.d_z,
            found: z.len(),
        });
    }
    let logits = &params.dec_w * DVector::from_column_slice(z) + &params.dec_b;
    Ok(logits.iter().copied().collect())
}

/// Decodes a latent to attribute tokens by per-group argmax over the
/// decoder logits. Total on any finite input.
pub fn vae_decode(params: &VaeParams, z: &[f64]) -> Result<PersonAttributes, CodecError> {
    let logits = vae_logits(params, z)?;
    decode_onehot(&logits).map_err(|_| CodecError::DimensionMismatch {
        expected: ONEHOT_DIM,
        found: logits.len(),
    })
}

/// ELBO-style loss (sum of per-group cross entropies plus KL), averaged
/// over the batch, with the noise draws supplied explicitly so the loss is
/// a deterministic function of the parameters.
pub fn elbo_loss(params: &VaeParams, data: &[Vec<f64>], eps: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for (x, e) in data.iter().zip(eps) {
        total += sample_loss_and_grads(params, x, e, None);
    }
    total / data.len() as f64
}

/// Analytic gradient of [`elbo_loss`] in the flat parameter layout.
pub fn elbo_gradients(params: &VaeParams, data: &[Vec<f64>], eps: &[Vec<f64>]) -> Vec<f64> {
    let mut grads = VaeGradients::zeros(params.d_z);
    for (x, e) in data.iter().zip(eps) {
        sample_loss_and_grads(params, x, e, Some(&mut grads));
    }
    grads.scale(1.0 / data.len() as f64);
    grads.to_flat()
}

struct VaeGradients {
    enc_w: DMatrix<f64>,
    enc_b: DVector<f64>,
    dec_w: DMatrix<f64>,
    dec_b: DVector<f64>,
}

impl VaeGradients {
    fn zeros(d_z: usize) -> Self {
        Self {
            enc_w: DMatrix::zeros(2 * d_z, ONEHOT_DIM),
            enc_b: DVector::zeros(2 * d_z),
            dec_w: DMatrix::zeros(ONEHOT_DIM, d_z),
            dec_b: DVector::zeros(ONEHOT_DIM),
        }
    }

    fn scale(&mut self, s: f64) {
        self.enc_w *= s;
        self.enc_b *= s;
        self.dec_w *= s;
        self.dec_b *= s;
    }

    fn to_flat(&self) -> Vec<f64> {
        let as_params = VaeParams {
            d_z: self.enc_b.len() / 2,
            enc_w: self.enc_w.clone(),
            enc_b: self.enc_b.clone(),
            dec_w: self.dec_w.clone(),
            dec_b: self.dec_b.clone(),
        };
        as_params.to_flat()
    }
}

/// Forward pass for one sample; accumulates gradients when requested.
/// Returns the per-sample loss.
fn sample_loss_and_grads(
    params: &VaeParams,
    x: &[f64],
    eps: &[f64],
    grads: Option<&mut VaeGradients>,
) -> f64 {
    let d_z = params.d_z;
    let xv = DVector::from_column_slice(x);
    let h = &params.enc_w * &xv + &params.enc_b;
    let mu = h.rows(0, d_z).into_owned();
    let lv_raw = h.rows(d_z, d_z).into_owned();
    let lv = lv_raw.map(|v| v.clamp(-LOGVAR_CLAMP, LOGVAR_CLAMP));
    let sigma = lv.map(|v| (v / 2.0).exp());

    let epsv = DVector::from_column_slice(eps);
    let z = &mu + epsv.component_mul(&sigma);
    let logits = &params.dec_w * &z + &params.dec_b;

    // Per-group softmax cross entropy against the one-hot target.
    let mut ce = 0.0;
    let mut delta_logits = DVector::zeros(ONEHOT_DIM);
    let mut offset = 0;
    for size in GROUP_SIZES {
        let group = logits.rows(offset, size);
        let max = group.max();
        let exp_sum: f64 = group.iter().map(|l| (l - max).exp()).sum();
        let log_norm = max + exp_sum.ln();
        for i in 0..size {
            let p = (group[i] - log_norm).exp();
            let target = x[offset + i];
            ce -= target * (group[i] - log_norm);
            delta_logits[offset + i] = p - target;
        }
        offset += size;
    }

    let kl = 0.5
        * mu.iter()
            .zip(lv.iter())
            .map(|(m, l)| m * m + l.exp() - 1.0 - l)
            .sum::<f64>();
    let loss = ce + kl;

    if let Some(grads) = grads {
        grads.dec_w += &delta_logits * z.transpose();
        grads.dec_b += &delta_logits;
        let delta_z = params.dec_w.transpose() * &delta_logits;

        let delta_mu = &delta_z + &mu;
        let mut delta_lv = DVector::zeros(d_z);
        for i in 0..d_z {
            // Gradient flows through the clamp only inside its range.
            let inside = lv_raw[i].abs() < LOGVAR_CLAMP;
            if inside {
                delta_lv[i] =
                    delta_z[i] * eps[i] * sigma[i] / 2.0 + 0.5 * (lv[i].exp() - 1.0);
            }
        }

        let mut delta_h = DVector::zeros(2 * d_z);
        delta_h.rows_mut(0, d_z).copy_from(&delta_mu);
        delta_h.rows_mut(d_z, d_z).copy_from(&delta_lv);
        grads.enc_w += &delta_h * xv.transpose();
        grads.enc_b += &delta_h;
    }

    loss
}

/// A trained model plus its per-epoch loss trace.
#[derive(Debug, Clone)]
pub struct VaeTrained {
    pub params: VaeParams,
    pub loss_trace: Vec<f64>,
}

/// Full-batch gradient descent on the ELBO loss with fresh seeded noise
/// draws each epoch.
pub fn vae_train(
    onehots: &[Vec<f64>],
    d_z: usize,
    hyper: &VaeTrainConfig,
) -> Result<VaeTrained, CodecError> {
    if onehots.is_empty() {
        return Err(CodecError::EmptyTrainingSet);
    }
    for x in onehots {
        if x.len() != ONEHOT_DIM {
            return Err(CodecError::DimensionMismatch {
                expected: ONEHOT_DIM,
                found: x.len(),
            });
        }
    }

    let mut rng = ChaCha20Rng::seed_from_u64(hyper.seed);
    let mut params = VaeParams::random(d_z, hyper.init_scale, &mut rng);
    let mut loss_trace = Vec::with_capacity(hyper.epochs);

    for epoch in 0..hyper.epochs {
        let eps: Vec<Vec<f64>> = (0..onehots.len())
            .map(|_| (0..d_z).map(|_| rng.sample(StandardNormal)).collect())
            .collect();

        let mut grads = VaeGradients::zeros(d_z);
        let mut total = 0.0;
        for (x, e) in onehots.iter().zip(&eps) {
            total += sample_loss_and_grads(&params, x, e, Some(&mut grads));
        }
        let loss = total / onehots.len() as f64;
        if !loss.is_finite() {
            return Err(CodecError::TrainingDiverged { epoch });
        }
        loss_trace.push(loss);

        let scale = hyper.lr / onehots.len() as f64;
        params.enc_w -= &grads.enc_w * scale;
        params.enc_b -= &grads.enc_b * scale;
        params.dec_w -= &grads.dec_w * scale;
        params.dec_b -= &grads.dec_b * scale;
    }

    Ok(VaeTrained { params, loss_trace })
}

/// Fraction of (frame, slot) pairs whose attribute decodes correctly from
/// the posterior mean, the zero-channel-noise reconstruction accuracy.
pub fn reconstruction_accuracy(
    params: &VaeParams,
    frames: &[(Vec<f64>, PersonAttributes)],
) -> Result<f64, CodecError> {
    use crate::corpus::PERSON_SLOTS;
    let mut correct = 0usize;
    let mut total = 0usize;
    for (x, truth) in frames {
        let (mu, _) = vae_encode(params, x)?;
        let decoded = vae_decode(params, &mu)?;
        for slot in PERSON_SLOTS {
            total += 1;
            if decoded.token(slot) == truth.token(slot) {
                correct += 1;
            }
        }
    }
    Ok(correct as f64 / total as f64)
}
