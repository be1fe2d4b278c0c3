//! Corpus persistence: JSON-lines for frames, a sibling JSON file for the
//! query and ground-truth labels.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::gen::{Corpus, SceneDescriptor};
use super::Query;
use super::CorpusError;

const FRAMES_FILE: &str = "corpus.jsonl";
const META_FILE: &str = "meta.json";

#[derive(Serialize, Deserialize)]
struct CorpusMeta {
    query: Query,
    labels: Vec<bool>,
}

/// Writes `corpus.jsonl` (one frame per line, payload as base64) and
/// `meta.json` (query plus labels) into `dir`.
pub fn save_corpus(corpus: &Corpus, dir: &Path) -> Result<(), CorpusError> {
    fs::create_dir_all(dir)?;
    let mut writer = BufWriter::new(fs::File::create(dir.join(FRAMES_FILE))?);
    for frame in &corpus.frames {
        serde_json::to_writer(&mut writer, frame)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;

    let meta = CorpusMeta {
        query: corpus.query.clone(),
        labels: corpus.labels.clone(),
    };
    fs::write(dir.join(META_FILE), serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

/// Loads a corpus previously written by [`save_corpus`].
pub fn load_corpus(dir: &Path) -> Result<Corpus, CorpusError> {
    let reader = BufReader::new(fs::File::open(dir.join(FRAMES_FILE))?);
    let mut frames: Vec<SceneDescriptor> = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        frames.push(serde_json::from_str(&line)?);
    }
    if frames.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let meta: CorpusMeta = serde_json::from_str(&fs::read_to_string(dir.join(META_FILE))?)?;
    Ok(Corpus {
        frames,
        query: meta.query,
        labels: meta.labels,
    })
}
