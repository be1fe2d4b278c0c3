//! Experiment configuration and scheme identifiers.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The five transmission schemes under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeId {
    Traditional,
    Vae,
    Gan,
    Dm,
    Generative,
}

impl SchemeId {
    pub const ALL: [SchemeId; 5] = [
        SchemeId::Traditional,
        SchemeId::Vae,
        SchemeId::Gan,
        SchemeId::Dm,
        SchemeId::Generative,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeId::Traditional => "traditional",
            SchemeId::Vae => "vae",
            SchemeId::Gan => "gan",
            SchemeId::Dm => "dm",
            SchemeId::Generative => "generative",
        }
    }
}

impl std::fmt::Display for SchemeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SchemeId {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "traditional" => Ok(SchemeId::Traditional),
            "vae" => Ok(SchemeId::Vae),
            "gan" => Ok(SchemeId::Gan),
            "dm" => Ok(SchemeId::Dm),
            "generative" => Ok(SchemeId::Generative),
            other => Err(ConfigError::UnknownScheme(other.to_string())),
        }
    }
}

/// Which backend drives the understanding/generating agents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LlmBackend {
    #[default]
    Mock,
    Http,
    Replay,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown scheme `{0}` (expected traditional|vae|gan|dm|generative)")]
    UnknownScheme(String),
    #[error("snr_list_db must not be empty")]
    EmptySnrList,
    #[error("reps must be at least 1")]
    ZeroReps,
    #[error("ldpc_n must be even, got {0}")]
    OddLdpcN(usize),
    #[error("config file error: {0}")]
    Io(#[from] std::io::Error),
    #[error("config file is malformed: {0}")]
    Format(#[from] serde_json::Error),
}

/// Everything a reproducible experiment needs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_master_seed")]
    pub master_seed: u64,
    #[serde(default = "default_frames")]
    pub frames: usize,
    #[serde(default = "default_payload_bytes")]
    pub payload_bytes: usize,
    #[serde(default = "default_snr_list")]
    pub snr_list_db: Vec<f64>,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default = "default_schemes")]
    pub schemes: Vec<SchemeId>,
    #[serde(default = "default_latent_dim")]
    pub latent_dim: usize,
    #[serde(default = "default_ldpc_n")]
    pub ldpc_n: usize,
    #[serde(default)]
    pub llm_backend: LlmBackend,
}

fn default_master_seed() -> u64 {
    1
}
fn default_frames() -> usize {
    200
}
fn default_payload_bytes() -> usize {
    65536
}
fn default_snr_list() -> Vec<f64> {
    (1..=10).map(|i| (3 * i) as f64).collect()
}
fn default_reps() -> usize {
    5
}
fn default_schemes() -> Vec<SchemeId> {
    SchemeId::ALL.to_vec()
}
fn default_latent_dim() -> usize {
    8
}
fn default_ldpc_n() -> usize {
    1024
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            master_seed: default_master_seed(),
            frames: default_frames(),
            payload_bytes: default_payload_bytes(),
            snr_list_db: default_snr_list(),
            reps: default_reps(),
            schemes: default_schemes(),
            latent_dim: default_latent_dim(),
            ldpc_n: default_ldpc_n(),
            llm_backend: LlmBackend::Mock,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.snr_list_db.is_empty() {
            return Err(ConfigError::EmptySnrList);
        }
        if self.reps == 0 {
            return Err(ConfigError::ZeroReps);
        }
        if self.ldpc_n % 2 != 0 {
            return Err(ConfigError::OddLdpcN(self.ldpc_n));
        }
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        let config: ExperimentConfig = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), ConfigError> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        let config = ExperimentConfig::default();
        assert!(config.validate().is_ok());
        assert_eq!(config.snr_list_db, vec![3.0, 6.0, 9.0, 12.0, 15.0, 18.0, 21.0, 24.0, 27.0, 30.0]);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut config = ExperimentConfig::default();
        config.snr_list_db.clear();
        assert!(matches!(config.validate(), Err(ConfigError::EmptySnrList)));

        let mut config = ExperimentConfig::default();
        config.reps = 0;
        assert!(matches!(config.validate(), Err(ConfigError::ZeroReps)));

        let mut config = ExperimentConfig::default();
        config.ldpc_n = 1023;
        assert!(matches!(config.validate(), Err(ConfigError::OddLdpcN(1023))));
    }

    #[test]
    fn scheme_ids_round_trip_through_strings() {
        for scheme in SchemeId::ALL {
            assert_eq!(scheme.as_str().parse::<SchemeId>().unwrap(), scheme);
        }
        assert!("mpeg".parse::<SchemeId>().is_err());
    }
}
