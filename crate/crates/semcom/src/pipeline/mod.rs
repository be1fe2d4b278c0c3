//! End-to-end scheme orchestration: the SNR sweep, retrieval metrics,
//! overhead accounting, threshold calibration, and CSV reporting.

mod accounting;
mod calibrate;
mod models;
mod report;
mod schemes;
mod seed;
mod sweep;

pub use accounting::{analog_frame_overhead_bits, digital_payload_overhead_bits};
pub use calibrate::{calibrate_threshold, Calibration};
pub use models::{measure_vae_accuracy, train_models, ModelMetrics, TrainedModels};
pub use report::{parse_results_csv, results_to_csv, summarize, summary_to_csv, SweepSummaryRow};
pub use schemes::{run_analog, run_generative, run_traditional, GenerativeAgents, RunRecord};
pub use seed::derive_seed;
pub use sweep::{sweep, LlmRuntime, SweepError};

use thiserror::Error;

use crate::config::SchemeId;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Corpus(#[from] crate::corpus::CorpusError),
    #[error(transparent)]
    Phy(#[from] crate::phy::PhyError),
    #[error(transparent)]
    Channel(#[from] crate::channel::ChannelError),
    #[error(transparent)]
    Codec(#[from] crate::codecs::CodecError),
    #[error(transparent)]
    Transformer(#[from] crate::transformer::TransformerError),
    #[error("agent backend failed: {0}")]
    Agent(#[from] crate::agents::AgentError),
    #[error("calibration failed: {0}")]
    Calibration(String),
    #[error("scheme {scheme} is not an analog codec scheme")]
    NotAnalog { scheme: SchemeId },
    #[error("results file is malformed at line {line}: {reason}")]
    MalformedCsv { line: usize, reason: String },
    #[error("file error: {0}")]
    Io(#[from] std::io::Error),
}
