//! Desk-scale generative codecs backing the three analog JSCC baselines:
//! a variational autoencoder with analytic gradients, least-squares
//! generator inversion with the minimax objective on discrete
//! distributions, and a denoising diffusion chain with channel denoising.

pub mod diffusion;
pub mod gan;
pub mod vae;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("training diverged (loss not finite) at epoch {epoch}")]
    TrainingDiverged { epoch: usize },
    #[error("training corpus must not be empty")]
    EmptyTrainingSet,
    #[error("latent iterate became non-finite at step {step}")]
    InversionDiverged { step: usize },
    #[error("learning rate {lr} is not below the stability bound {bound}")]
    LearningRateTooLarge { lr: f64, bound: f64 },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("diffusion timestep {t} outside 1..={max}")]
    TimestepOutOfRange { t: usize, max: usize },
    #[error("model file error: {0}")]
    Io(#[from] std::io::Error),
    #[error("model file is malformed: {0}")]
    Format(#[from] serde_json::Error),
}
