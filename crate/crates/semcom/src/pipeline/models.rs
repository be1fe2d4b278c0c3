//! Trained codec state shared by the analog schemes and the retrieval
//! head, plus the golden metrics file recorded beside the model.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::codecs::diffusion::NoiseSchedule;
use crate::codecs::gan::{gan_fit, GanGenerator};
use crate::codecs::vae::{
    reconstruction_accuracy, vae_encode, vae_train, VaeParams, VaeTrainConfig,
};
use crate::corpus::{encode_onehot, Corpus};
use crate::transformer::AttentionParams;

use super::PipelineError;

/// Everything the analog schemes and the generative head need at run
/// time. The VAE is trained; the generator fit, latent statistics, noise
/// schedule, and head weights are all deterministic functions of the
/// corpus and master seed.
#[derive(Debug, Clone)]
pub struct TrainedModels {
    pub vae: VaeParams,
    pub gan: GanGenerator,
    /// Per-dimension mean of the corpus posterior means.
    pub latent_mean: Vec<f64>,
    /// Per-dimension (population) variance of the corpus posterior means.
    pub latent_var: Vec<f64>,
    pub schedule: NoiseSchedule,
    pub head: AttentionParams,
}

impl TrainedModels {
    pub fn latent_dim(&self) -> usize {
        self.vae.d_z()
    }
}

/// Trains the VAE and fits everything else from the corpus.
pub fn train_models(
    corpus: &Corpus,
    latent_dim: usize,
    master_seed: u64,
) -> Result<TrainedModels, PipelineError> {
    let onehots: Vec<Vec<f64>> = corpus
        .frames
        .iter()
        .map(|f| encode_onehot(&f.attributes))
        .collect();

    let hyper = VaeTrainConfig {
        seed: master_seed,
        ..VaeTrainConfig::default()
    };
    let trained = vae_train(&onehots, latent_dim, &hyper)?;
    let gan = gan_fit(&onehots, latent_dim)?;

    let mut latents = Vec::with_capacity(onehots.len());
    for x in &onehots {
        let (mu, _) = vae_encode(&trained.params, x)?;
        latents.push(mu);
    }
    let n = latents.len() as f64;
    let mut latent_mean = vec![0.0; latent_dim];
    for z in &latents {
        for (m, v) in latent_mean.iter_mut().zip(z) {
            *m += v / n;
        }
    }
    let mut latent_var = vec![0.0; latent_dim];
    for z in &latents {
        for ((var, mean), v) in latent_var.iter_mut().zip(&latent_mean).zip(z) {
            *var += (v - mean) * (v - mean) / n;
        }
    }

    Ok(TrainedModels {
        vae: trained.params,
        gan,
        latent_mean,
        latent_var,
        schedule: NoiseSchedule::default(),
        head: AttentionParams::seeded(master_seed),
    })
}

/// Measured post-training metrics, persisted beside the model file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelMetrics {
    /// Per-(frame, slot) reconstruction accuracy from the posterior mean
    /// at zero channel noise.
    pub vae_reconstruction_accuracy: f64,
    /// Calibrated retrieval threshold.
    pub calibration_threshold: f64,
    /// F1 of the calibrated threshold on the held-out half.
    pub calibration_f1_holdout: f64,
    /// Fraction of (positive, negative) frame pairs ranked correctly by
    /// the sentence-embedding head.
    pub head_separation_rate: f64,
}

impl ModelMetrics {
    pub fn save(&self, path: &Path) -> Result<(), PipelineError> {
        std::fs::write(path, serde_json::to_string_pretty(self).map_err(std::io::Error::other)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| PipelineError::Io(std::io::Error::other(e)))
    }
}

/// VAE reconstruction accuracy over a corpus, the value recorded in the
/// golden metrics.
pub fn measure_vae_accuracy(models: &TrainedModels, corpus: &Corpus) -> Result<f64, PipelineError> {
    let labeled: Vec<(Vec<f64>, _)> = corpus
        .frames
        .iter()
        .map(|f| (encode_onehot(&f.attributes), f.attributes.clone()))
        .collect();
    Ok(reconstruction_accuracy(&models.vae, &labeled)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;
    use crate::corpus::gen_corpus;

    #[test]
    fn training_is_deterministic_given_the_seed() {
        let config = ExperimentConfig {
            master_seed: 1,
            frames: 16,
            payload_bytes: 8,
            ..ExperimentConfig::default()
        };
        let corpus = gen_corpus(&config).unwrap();
        let a = train_models(&corpus, 8, 1).unwrap();
        let b = train_models(&corpus, 8, 1).unwrap();
        assert_eq!(a.vae, b.vae);
        assert_eq!(a.gan, b.gan);
        assert_eq!(a.latent_mean, b.latent_mean);
        assert_eq!(a.latent_var, b.latent_var);
    }

    #[test]
    fn latent_statistics_are_finite_and_positive() {
        let config = ExperimentConfig {
            master_seed: 2,
            frames: 24,
            payload_bytes: 8,
            ..ExperimentConfig::default()
        };
        let corpus = gen_corpus(&config).unwrap();
        let models = train_models(&corpus, 8, 2).unwrap();
        assert!(models.latent_mean.iter().all(|v| v.is_finite()));
        assert!(models.latent_var.iter().all(|v| v.is_finite() && *v >= 0.0));
    }
}
