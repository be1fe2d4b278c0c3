//! Synthetic video-retrieval domain: attribute vocabularies, scene
//! descriptors standing in for keyframes, the entry wire format, one-hot
//! coding, and deterministic corpus generation.

mod entry;
mod gen;
mod io;
mod onehot;
mod vocab;

pub use entry::{parse_entry, serialize_entry, EntryParse, EntryRecord, EntryReport, Query};
pub use gen::gen_corpus;
pub use gen::{Corpus, PersonAttributes, SceneDescriptor};
pub use io::{load_corpus, save_corpus};
pub use onehot::{decode_onehot, encode_onehot, GROUP_SIZES, ONEHOT_DIM};
pub use vocab::{AttributeVocab, Slot, PERSON_SLOTS};
pub(crate) use vocab::is_valid_time;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus must contain at least one frame")]
    EmptyCorpus,
    #[error("entry line has {found} comma-separated fields, expected 8")]
    FieldCount { found: usize },
    #[error("entry line is not valid ASCII text")]
    NotAscii,
    #[error("one-hot vector has dimension {found}, expected {expected}")]
    Shape { expected: usize, found: usize },
    #[error("corpus file error: {0}")]
    Io(#[from] std::io::Error),
    #[error("corpus file is malformed: {0}")]
    Format(#[from] serde_json::Error),
}
