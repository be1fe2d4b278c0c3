//! Deterministic corpus generation.

use rand::prelude::*;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

use super::entry::{EntryRecord, Query};
use super::vocab::{AttributeVocab, Slot, PERSON_SLOTS};
use super::CorpusError;

/// The six person attributes of one frame.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersonAttributes {
    pub gender: String,
    pub shirt_color: String,
    pub shirt_length: String,
    pub pants_color: String,
    pub pants_length: String,
    pub shoe_color: String,
}

impl PersonAttributes {
    pub fn token(&self, slot: Slot) -> &str {
        match slot {
            Slot::Gender => &self.gender,
            Slot::ShirtColor => &self.shirt_color,
            Slot::ShirtLength => &self.shirt_length,
            Slot::PantsColor => &self.pants_color,
            Slot::PantsLength => &self.pants_length,
            Slot::ShoeColor => &self.shoe_color,
        }
    }

    pub fn matches_query(&self, query: &Query) -> bool {
        PERSON_SLOTS
            .iter()
            .all(|s| self.token(*s) == query.token(*s))
    }

    fn with_token(&self, slot: Slot, token: String) -> Self {
        let mut copy = self.clone();
        match slot {
            Slot::Gender => copy.gender = token,
            Slot::ShirtColor => copy.shirt_color = token,
            Slot::ShirtLength => copy.shirt_length = token,
            Slot::PantsColor => copy.pants_color = token,
            Slot::PantsLength => copy.pants_length = token,
            Slot::ShoeColor => copy.shoe_color = token,
        }
        copy
    }

    fn random(rng: &mut impl Rng) -> Self {
        let pick = |rng: &mut dyn RngCore, slot: Slot| {
            let tokens = AttributeVocab::slot_tokens(slot);
            tokens[rng.gen_range(0..tokens.len())].to_string()
        };
        PersonAttributes {
            gender: pick(rng, Slot::Gender),
            shirt_color: pick(rng, Slot::ShirtColor),
            shirt_length: pick(rng, Slot::ShirtLength),
            pants_color: pick(rng, Slot::PantsColor),
            pants_length: pick(rng, Slot::PantsLength),
            shoe_color: pick(rng, Slot::ShoeColor),
        }
    }
}

/// Ground truth for one keyframe: metadata, person attributes, and a
/// pseudo-random byte payload standing in for the coded frame itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneDescriptor {
    pub frame_id: u32,
    pub time: String,
    pub location: String,
    pub attributes: PersonAttributes,
    #[serde(with = "payload_base64")]
    pub raw_payload: Vec<u8>,
}

impl SceneDescriptor {
    /// The entry a perfect transmitter would produce for this frame.
    pub fn ground_truth_entry(&self) -> EntryRecord {
        EntryRecord {
            time: self.time.clone(),
            location: self.location.clone(),
            gender: self.attributes.gender.clone(),
            shirt_color: self.attributes.shirt_color.clone(),
            shirt_length: self.attributes.shirt_length.clone(),
            pants_color: self.attributes.pants_color.clone(),
            pants_length: self.attributes.pants_length.clone(),
            shoe_color: self.attributes.shoe_color.clone(),
        }
    }
}

mod payload_base64 {
    use base64::engine::general_purpose::STANDARD;
    use base64::Engine;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&STANDARD.encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<u8>, D::Error> {
        let text = String::deserialize(de)?;
        STANDARD.decode(text).map_err(serde::de::Error::custom)
    }
}

/// A generated corpus with its retrieval query and ground-truth labels.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub frames: Vec<SceneDescriptor>,
    pub query: Query,
    /// `labels[i]` is true iff frame `i` matches the query on all six
    /// person slots.
    pub labels: Vec<bool>,
}

impl Corpus {
    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|l| **l).count()
    }
}

/// Fraction of non-matching frames drawn as near misses.
const NEAR_MISS_RATE: f64 = 0.25;

/// Query attributes with exactly two slots replaced by different tokens.
fn near_miss(query_attrs: &PersonAttributes, rng: &mut impl Rng) -> PersonAttributes {
    let first = rng.gen_range(0..PERSON_SLOTS.len());
    let second = loop {
        let candidate = rng.gen_range(0..PERSON_SLOTS.len());
        if candidate != first {
            break candidate;
        }
    };
    let mut attrs = query_attrs.clone();
    for slot in [PERSON_SLOTS[first], PERSON_SLOTS[second]] {
        let tokens = AttributeVocab::slot_tokens(slot);
        let replacement = loop {
            let candidate = tokens[rng.gen_range(0..tokens.len())];
            if candidate != query_attrs.token(slot) {
                break candidate.to_string();
            }
        };
        attrs = attrs.with_token(slot, replacement);
    }
    attrs
}

/// Generates a corpus deterministically from `config.master_seed`.
///
/// Exactly `ceil(frames / 4)` frames carry the query attributes on all six
/// slots; every other frame differs from the query in at least one slot.
/// A quarter of the non-matching frames are near misses that differ from
/// the query in exactly two slots, so retrieval precision has hard
/// negatives to lose against; the rest are uniform draws.
pub fn gen_corpus(config: &ExperimentConfig) -> Result<Corpus, CorpusError> {
    if config.frames == 0 {
        return Err(CorpusError::EmptyCorpus);
    }
    let mut rng = ChaCha20Rng::seed_from_u64(config.master_seed);

    let query_attrs = PersonAttributes::random(&mut rng);
    let query = Query {
        gender: query_attrs.gender.clone(),
        shirt_color: query_attrs.shirt_color.clone(),
        shirt_length: query_attrs.shirt_length.clone(),
        pants_color: query_attrs.pants_color.clone(),
        pants_length: query_attrs.pants_length.clone(),
        shoe_color: query_attrs.shoe_color.clone(),
    };

    let match_count = config.frames.div_ceil(4);
    let mut indices: Vec<usize> = (0..config.frames).collect();
    indices.shuffle(&mut rng);
    let mut is_match = vec![false; config.frames];
    for &i in indices.iter().take(match_count) {
        is_match[i] = true;
    }

    let locations = AttributeVocab::locations();
    let mut frames = Vec::with_capacity(config.frames);
    for (i, matched) in is_match.iter().enumerate() {
        let attributes = if *matched {
            query_attrs.clone()
        } else if rng.gen::<f64>() < NEAR_MISS_RATE {
            near_miss(&query_attrs, &mut rng)
        } else {
            loop {
                let candidate = PersonAttributes::random(&mut rng);
                if !candidate.matches_query(&query) {
                    break candidate;
                }
            }
        };
        let time = format!(
            "{:02}:{:02}:{:02}",
            rng.gen_range(0..24u8),
            rng.gen_range(0..60u8),
            rng.gen_range(0..60u8)
        );
        let location = locations[rng.gen_range(0..locations.len())].to_string();
        let mut raw_payload = vec![0u8; config.payload_bytes];
        rng.fill_bytes(&mut raw_payload);
        frames.push(SceneDescriptor {
            frame_id: i as u32,
            time,
            location,
            attributes,
            raw_payload,
        });
    }

    let labels = frames
        .iter()
        .map(|f| f.attributes.matches_query(&query))
        .collect();

    Ok(Corpus {
        frames,
        query,
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(seed: u64, frames: usize) -> ExperimentConfig {
        ExperimentConfig {
            master_seed: seed,
            frames,
            payload_bytes: 64,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn eight_frames_yield_two_matches() {
        let corpus = gen_corpus(&small_config(1, 8)).unwrap();
        assert_eq!(corpus.positives(), 2);
        assert_eq!(corpus.labels.iter().filter(|l| !**l).count(), 6);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = gen_corpus(&small_config(1, 8)).unwrap();
        let b = gen_corpus(&small_config(1, 8)).unwrap();
        assert_eq!(a.frames, b.frames);
        assert_eq!(a.query, b.query);
        assert_eq!(a.labels, b.labels);
    }

    #[test]
    fn seed_two_hundred_frames_has_fifty_positives_and_recountable_labels() {
        let corpus = gen_corpus(&small_config(2, 200)).unwrap();
        assert_eq!(corpus.positives(), 50);

        // Independent recount: label agreement with raw attribute equality.
        for (frame, label) in corpus.frames.iter().zip(&corpus.labels) {
            let recount = PERSON_SLOTS
                .iter()
                .all(|s| frame.attributes.token(*s) == corpus.query.token(*s));
            assert_eq!(recount, *label);
        }
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(matches!(
            gen_corpus(&small_config(1, 0)),
            Err(CorpusError::EmptyCorpus)
        ));
    }

    #[test]
    fn payload_length_matches_config() {
        let corpus = gen_corpus(&small_config(3, 4)).unwrap();
        assert!(corpus.frames.iter().all(|f| f.raw_payload.len() == 64));
    }

    #[test]
    fn entry_serialization_is_injective_over_a_corpus() {
        use crate::corpus::entry::serialize_entry;
        use std::collections::HashSet;

        let corpus = gen_corpus(&small_config(1, 200)).unwrap();
        let mut seen: HashSet<Vec<u8>> = HashSet::new();
        let mut distinct_entries: HashSet<String> = HashSet::new();
        for frame in &corpus.frames {
            let entry = frame.ground_truth_entry();
            let line = serialize_entry(&entry);
            distinct_entries.insert(format!("{entry:?}"));
            seen.insert(line);
        }
        assert_eq!(seen.len(), distinct_entries.len());
    }
}
