//! A single numeric transformer block (multi-head self-attention, FFN,
//! post-norm residuals) plus the deterministic sentence-embedding head
//! used for retrieval decisions.
//!
//! Token embeddings are fixed Gaussian vectors derived from a seeded hash,
//! so the whole head is a pure function of (text, seed) with no trained
//! weights and no positional encoding.

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};
use thiserror::Error;

const LAYER_NORM_EPS: f64 = 1e-5;

#[derive(Debug, Error)]
pub enum TransformerError {
    #[error("dimension mismatch: {0}")]
    Dimensions(String),
    #[error("text has no tokens after normalization")]
    EmptyText,
}

/// Weights for one transformer block, deterministic from the seed.
#[derive(Debug, Clone)]
pub struct AttentionParams {
    n_heads: usize,
    d_model: usize,
    d_k: usize,
    w_q: Vec<DMatrix<f64>>,
    w_k: Vec<DMatrix<f64>>,
    w_v: Vec<DMatrix<f64>>,
    w_o: DMatrix<f64>,
    ffn_w1: DMatrix<f64>,
    ffn_b1: DVector<f64>,
    ffn_w2: DMatrix<f64>,
    ffn_b2: DVector<f64>,
    ln1_gain: DVector<f64>,
    ln1_bias: DVector<f64>,
    ln2_gain: DVector<f64>,
    ln2_bias: DVector<f64>,
    seed: u64,
}

impl AttentionParams {
    /// Standard head: d_model 32, 4 heads, FFN hidden 64.
    pub fn seeded(seed: u64) -> Self {
        Self::seeded_with(seed, 32, 4, 64)
    }

    pub fn seeded_with(seed: u64, d_model: usize, n_heads: usize, ffn_hidden: usize) -> Self {
        assert!(d_model % n_heads == 0, "d_model must split across heads");
        let d_k = d_model / n_heads;
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let scale = 0.05;
        let mut draw = |rows: usize, cols: usize| {
            DMatrix::from_fn(rows, cols, |_, _| {
                rng.sample::<f64, _>(StandardNormal) * scale
            })
        };
        let w_q = (0..n_heads).map(|_| draw(d_model, d_k)).collect();
        let w_k = (0..n_heads).map(|_| draw(d_model, d_k)).collect();
        let w_v = (0..n_heads).map(|_| draw(d_model, d_k)).collect();
        let w_o = draw(d_model, d_model);
        let ffn_w1 = draw(d_model, ffn_hidden);
        let ffn_w2 = draw(ffn_hidden, d_model);
        Self {
            n_heads,
            d_model,
            d_k,
            w_q,
            w_k,
            w_v,
            w_o,
            ffn_w1,
            ffn_b1: DVector::zeros(ffn_hidden),
            ffn_w2,
            ffn_b2: DVector::zeros(d_model),
            ln1_gain: DVector::from_element(d_model, 1.0),
            ln1_bias: DVector::zeros(d_model),
            ln2_gain: DVector::from_element(d_model, 1.0),
            ln2_bias: DVector::zeros(d_model),
            seed,
        }
    }

    pub fn d_model(&self) -> usize {
        self.d_model
    }

    pub fn n_heads(&self) -> usize {
        self.n_heads
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Row-wise softmax(Q K^T / sqrt(d_k)), stabilized by subtracting each
/// row's maximum.
pub fn attention_weights(
    q: &DMatrix<f64>,
    k: &DMatrix<f64>,
) -> Result<DMatrix<f64>, TransformerError> {
    if q.ncols() != k.ncols() || q.ncols() == 0 {
        return Err(TransformerError::Dimensions(format!(
            "query width {} vs key width {}",
            q.ncols(),
            k.ncols()
        )));
    }
    let scale = 1.0 / (q.ncols() as f64).sqrt();
    let mut scores = q * k.transpose() * scale;
    for mut row in scores.row_iter_mut() {
        let max = row.iter().fold(f64::NEG_INFINITY, |a, b| a.max(*b));
        let mut total = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            total += *v;
        }
        for v in row.iter_mut() {
            *v /= total;
        }
    }
    Ok(scores)
}

/// Scaled dot-product attention.
pub fn attention(
    q: &DMatrix<f64>,
    k: &DMatrix<f64>,
    v: &DMatrix<f64>,
) -> Result<DMatrix<f64>, TransformerError> {
    if k.nrows() != v.nrows() {
        return Err(TransformerError::Dimensions(format!(
            "{} keys vs {} values",
            k.nrows(),
            v.nrows()
        )));
    }
    Ok(attention_weights(q, k)? * v)
}

/// Multi-head self-attention: per-head projections, scaled dot-product
/// attention, concatenation, output projection.
pub fn mhsa(x: &DMatrix<f64>, params: &AttentionParams) -> Result<DMatrix<f64>, TransformerError> {
    check_width(x, params)?;
    let rows = x.nrows();
    let mut concat = DMatrix::zeros(rows, params.d_model);
    for h in 0..params.n_heads {
        let q = x * &params.w_q[h];
        let k = x * &params.w_k[h];
        let v = x * &params.w_v[h];
        let head = attention(&q, &k, &v)?;
        concat
            .view_mut((0, h * params.d_k), (rows, params.d_k))
            .copy_from(&head);
    }
    Ok(concat * &params.w_o)
}

fn check_width(x: &DMatrix<f64>, params: &AttentionParams) -> Result<(), TransformerError> {
    if x.ncols() != params.d_model {
        return Err(TransformerError::Dimensions(format!(
            "input width {} vs d_model {}",
            x.ncols(),
            params.d_model
        )));
    }
    Ok(())
}

/// Row-wise layer normalization followed by gain and bias.
fn layer_norm(x: &DMatrix<f64>, gain: &DVector<f64>, bias: &DVector<f64>) -> DMatrix<f64> {
    let d = x.ncols() as f64;
    let mut out = x.clone();
    for mut row in out.row_iter_mut() {
        let mean = row.iter().sum::<f64>() / d;
        let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / d;
        let inv = 1.0 / (var + LAYER_NORM_EPS).sqrt();
        for (j, v) in row.iter_mut().enumerate() {
            *v = (*v - mean) * inv * gain[j] + bias[j];
        }
    }
    out
}

fn ffn(x: &DMatrix<f64>, params: &AttentionParams) -> DMatrix<f64> {
    let mut hidden = x * &params.ffn_w1;
    for mut row in hidden.row_iter_mut() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (*v + params.ffn_b1[j]).max(0.0);
        }
    }
    let mut out = hidden * &params.ffn_w2;
    for mut row in out.row_iter_mut() {
        for (j, v) in row.iter_mut().enumerate() {
            *v += params.ffn_b2[j];
        }
    }
    out
}

/// Full block, post-norm: LayerNorm(X + MHSA(X)) then
/// LayerNorm(X1 + FFN(X1)).
pub fn block_forward(
    x: &DMatrix<f64>,
    params: &AttentionParams,
) -> Result<DMatrix<f64>, TransformerError> {
    let x1 = layer_norm(&(x + mhsa(x, params)?), &params.ln1_gain, &params.ln1_bias);
    Ok(layer_norm(
        &(&x1 + ffn(&x1, params)),
        &params.ln2_gain,
        &params.ln2_bias,
    ))
}

/// Lowercase tokenization on non-alphanumeric boundaries.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Fixed Gaussian embedding for one token, keyed by a seeded hash so each
/// token always maps to the same vector.
fn token_embedding(token: &str, seed: u64, d_model: usize) -> Vec<f64> {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_be_bytes());
    hasher.update(token.as_bytes());
    let digest = hasher.finalize();
    let token_seed = u64::from_be_bytes(digest[..8].try_into().expect("digest is 32 bytes"));
    let mut rng = ChaCha20Rng::seed_from_u64(token_seed);
    (0..d_model).map(|_| rng.sample(StandardNormal)).collect()
}

/// Sentence embedding: hash-embed tokens, run the block, mean-pool rows,
/// normalize to unit length.
pub fn embed_text(text: &str, params: &AttentionParams) -> Result<Vec<f64>, TransformerError> {
    let tokens = tokenize(text);
    if tokens.is_empty() {
        return Err(TransformerError::EmptyText);
    }
    let rows: Vec<Vec<f64>> = tokens
        .iter()
        .map(|t| token_embedding(t, params.seed, params.d_model))
        .collect();
    let x = DMatrix::from_fn(tokens.len(), params.d_model, |r, c| rows[r][c]);
    let out = block_forward(&x, params)?;

    let mut pooled = vec![0.0f64; params.d_model];
    for row in out.row_iter() {
        for (j, v) in row.iter().enumerate() {
            pooled[j] += v;
        }
    }
    let norm = pooled.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(TransformerError::EmptyText);
    }
    for v in &mut pooled {
        *v /= norm;
    }
    Ok(pooled)
}

/// Cosine similarity of two unit vectors, clamped into [-1, 1].
pub fn cosine(u: &[f64], v: &[f64]) -> f64 {
    u.iter()
        .zip(v)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        .clamp(-1.0, 1.0)
}
