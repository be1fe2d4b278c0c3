//! Generator inversion as semantic encoding, plus the minimax objective
//! evaluated exactly on discrete distributions.
//!
//! Adversarial training is deliberately absent: the linear generator is
//! the least-squares optimal rank-d map for the corpus (its top principal
//! directions), which makes every inversion claim checkable against the
//! normal equations.

use nalgebra::{DMatrix, DVector};

use crate::corpus::ONEHOT_DIM;

use super::CodecError;

/// Linear generator G mapping a d_z latent to the 30-dim one-hot space.
#[derive(Debug, Clone, PartialEq)]
pub struct GanGenerator {
    g: DMatrix<f64>,
}

impl GanGenerator {
    pub fn d_z(&self) -> usize {
        self.g.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.g
    }

    /// Generator output G z.
    pub fn generate(&self, z: &[f64]) -> Result<Vec<f64>, CodecError> {
        if z.len() != self.d_z() {
            return Err(CodecError::DimensionMismatch {
                expected: self.d_z(),
                found: z.len(),
            });
        }
        Ok((&self.g * DVector::from_column_slice(z))
            .iter()
            .copied()
            .collect())
    }
}

/// Fits the generator to a corpus by least squares: the rank-d_z linear
/// map minimizing total squared reconstruction error over the one-hots is
/// spanned by the top d_z eigenvectors of the (uncentered) Gram matrix.
/// The returned columns are orthonormal, so G has full column rank.
pub fn gan_fit(onehots: &[Vec<f64>], d_z: usize) -> Result<GanGenerator, CodecError> {
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

    let mut gram = DMatrix::zeros(ONEHOT_DIM, ONEHOT_DIM);
    for x in onehots {
        let xv = DVector::from_column_slice(x);
        gram += &xv * xv.transpose();
    }
    let eigen = nalgebra::SymmetricEigen::new(gram);

    let mut order: Vec<usize> = (0..ONEHOT_DIM).collect();
    order.sort_by(|a, b| {
        eigen.eigenvalues[*b]
            .partial_cmp(&eigen.eigenvalues[*a])
            .expect("finite eigenvalues")
    });
    if eigen.eigenvalues[order[d_z - 1]] <= 1e-12 {
        return Err(CodecError::InvalidDistribution(
            "corpus spans fewer directions than the latent dimension".into(),
        ));
    }

    let mut g = DMatrix::zeros(ONEHOT_DIM, d_z);
    for (j, idx) in order.iter().take(d_z).enumerate() {
        g.set_column(j, &eigen.eigenvectors.column(*idx));
    }
    Ok(GanGenerator { g })
}

/// Inversion trace: the final latent plus the squared-error residual after
/// each descent step (index 0 is the starting residual).
#[derive(Debug, Clone)]
pub struct InversionResult {
    pub z: Vec<f64>,
    pub residuals: Vec<f64>,
}

/// Recovers the latent whose generator output best matches `x` by
/// gradient descent on the squared error, starting from zero.
///
/// The objective is a convex quadratic with curvature 2 G^T G, so the
/// step size must stay below 2 / (2 lambda_max); that bound is checked
/// before iterating.
pub fn gan_invert(
    generator: &GanGenerator,
    x: &[f64],
    steps: usize,
    lr: f64,
) -> Result<InversionResult, CodecError> {
    if x.len() != ONEHOT_DIM {
        return Err(CodecError::DimensionMismatch {
            expected: ONEHOT_DIM,
            found: x.len(),
        });
    }
    let gtg = generator.g.transpose() * &generator.g;
    let lambda_max = nalgebra::SymmetricEigen::new(gtg)
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, v| acc.max(*v));
    let bound = 1.0 / lambda_max;
    if lr >= bound {
        return Err(CodecError::LearningRateTooLarge { lr, bound });
    }

    let xv = DVector::from_column_slice(x);
    let mut z = DVector::zeros(generator.d_z());
    let mut residuals = Vec::with_capacity(steps + 1);
    residuals.push((&generator.g * &z - &xv).norm_squared());
    for step in 0..steps {
        let error = &generator.g * &z - &xv;
        let grad = generator.g.transpose() * error * 2.0;
        z -= grad * lr;
        if z.iter().any(|v| !v.is_finite()) {
            return Err(CodecError::InversionDiverged { step });
        }
        residuals.push((&generator.g * &z - &xv).norm_squared());
    }
    Ok(InversionResult {
        z: z.iter().copied().collect(),
        residuals,
    })
}

/// Aligned data and generator distributions over one finite support.
#[derive(Debug, Clone)]
pub struct DiscreteDistPair {
    pub p_data: Vec<f64>,
    pub p_g: Vec<f64>,
}

impl DiscreteDistPair {
    pub fn new(p_data: Vec<f64>, p_g: Vec<f64>) -> Result<Self, CodecError> {
        if p_data.len() != p_g.len() || p_data.is_empty() {
            return Err(CodecError::InvalidDistribution(
                "supports must align and be non-empty".into(),
            ));
        }
        for p in [&p_data, &p_g] {
            if p.iter().any(|v| *v < 0.0) {
                return Err(CodecError::InvalidDistribution(
                    "probabilities must be non-negative".into(),
                ));
            }
            let total: f64 = p.iter().sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(CodecError::InvalidDistribution(format!(
                    "probabilities sum to {total}"
                )));
            }
        }
        Ok(Self { p_data, p_g })
    }
}

const LOG_FLOOR: f64 = 1e-12;

/// The closed-form best discriminator D*(x) = p_data / (p_data + p_g),
/// with 0/0 resolved to 1/2.
pub fn optimal_discriminator(pair: &DiscreteDistPair) -> Vec<f64> {
    pair.p_data
        .iter()
        .zip(&pair.p_g)
        .map(|(pd, pg)| {
            let total = pd + pg;
            if total == 0.0 {
                0.5
            } else {
                pd / total
            }
        })
        .collect()
}

/// Minimax objective V(D, G) = E_data[ln D] + E_g[ln(1 - D)], with the
/// logarithms floored at 1e-12.
pub fn minimax_value(pair: &DiscreteDistPair, discriminator: &[f64]) -> Result<f64, CodecError> {
    if discriminator.len() != pair.p_data.len() {
        return Err(CodecError::DimensionMismatch {
            expected: pair.p_data.len(),
            found: discriminator.len(),
        });
    }
    let mut value = 0.0;
    for ((pd, pg), d) in pair.p_data.iter().zip(&pair.p_g).zip(discriminator) {
        value += pd * d.max(LOG_FLOOR).ln();
        value += pg * (1.0 - d).max(LOG_FLOOR).ln();
    }
    Ok(value)
}
