//! The two agents framing the generative scheme: an understanding agent
//! condensing frames into entries at the transmitter, and a generating
//! agent expanding received entries into sentences at the receiver.
//!
//! Both run against pluggable backends: a deterministic mock with a
//! tunable perception-noise knob, a live chat service, or recorded
//! fixtures for replay.

mod chat;
mod memory;
mod repair;

pub use chat::{fixture_key, ChatClient, ChatMode, ChatPolicy};
pub use memory::MemorySystem;
pub use repair::{levenshtein, repair_tokens};

use rand::prelude::*;
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::corpus::{AttributeVocab, EntryRecord, Query, SceneDescriptor, Slot, PERSON_SLOTS};

/// Transmitter-side role prompt sent to chat backends.
pub const UNDERSTANDING_PROMPT: &str = "You are a video attribute extraction expert. Your task is to analyze a given video frame and accurately extract the attributes related to a person's appearance. Please provide the output as a concise list of keywords following this format as output. Ensure the output is a single line and does not span multiple lines: [gender], [shirt color], [shirt length], [pants color], [pants length], [shoe color].";

/// Receiver-side role prompt sent to chat backends.
pub const GENERATING_PROMPT: &str = "You are a semantic expansion assistant. Given an input in the format: [time], [location], [gender], [shirt color], [shirt length], [pants color], [pants length], [shoe color], your task is to expand it into a complete sentence using the following structure: \"This is a [gender] person wearing a [shirt color] [shirt length] shirt, [pants color] [pants length] pants, and [shoe color] shoes. [He/She] appeared at [location] at [time].\"";

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("operation requires the {expected} role")]
    WrongRole { expected: &'static str },
    #[error("perception flip probability {0} outside [0, 1)")]
    InvalidFlipProb(f64),
    #[error("backend response spans multiple lines")]
    MultiLineResponse,
    #[error("backend returned {found} comma-separated attributes, expected 6")]
    BadFieldCount { found: usize },
    #[error("chat backend failed after {attempts} attempts: {last}")]
    Exhausted { attempts: usize, last: String },
    #[error("chat endpoint returned status {0}")]
    HttpStatus(u16),
    #[error("chat response is missing the `{missing}` field")]
    MalformedResponse { missing: String },
    #[error("no fixture recorded for request {key}")]
    MissingFixture { key: String },
    #[error("fixture store error: {0}")]
    Io(#[from] std::io::Error),
    #[error("fixture content is malformed: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgentRole {
    Understanding,
    Generating,
}

/// Backend driving an agent.
#[derive(Debug, Clone)]
pub enum AgentBackend {
    /// Deterministic stand-in. Each of the six person attributes is
    /// independently replaced by a uniformly random in-vocabulary token
    /// with probability `flip_prob`; randomness derives from
    /// `(seed, frame_id)` so calls are order-independent.
    Mock { flip_prob: f64, seed: u64 },
    /// Live, recording, or replaying chat service.
    Chat(ChatClient),
}

#[derive(Debug, Clone)]
pub struct AgentConfig {
    pub role: AgentRole,
    pub role_prompt: String,
    pub backend: AgentBackend,
}

/// One agent instance; construct via the role-specific helpers.
#[derive(Debug, Clone)]
pub struct Agent {
    config: AgentConfig,
}

impl Agent {
    pub fn new(config: AgentConfig) -> Result<Self, AgentError> {
        if let AgentBackend::Mock { flip_prob, .. } = config.backend {
            if !(0.0..1.0).contains(&flip_prob) {
                return Err(AgentError::InvalidFlipProb(flip_prob));
            }
        }
        Ok(Self { config })
    }

    pub fn understanding_mock(flip_prob: f64, seed: u64) -> Result<Self, AgentError> {
        Self::new(AgentConfig {
            role: AgentRole::Understanding,
            role_prompt: UNDERSTANDING_PROMPT.to_string(),
            backend: AgentBackend::Mock { flip_prob, seed },
        })
    }

    pub fn generating_mock() -> Self {
        Self::new(AgentConfig {
            role: AgentRole::Generating,
            role_prompt: GENERATING_PROMPT.to_string(),
            backend: AgentBackend::Mock {
                flip_prob: 0.0,
                seed: 0,
            },
        })
        .expect("zero flip probability is valid")
    }

    pub fn understanding_chat(client: ChatClient) -> Self {
        Self {
            config: AgentConfig {
                role: AgentRole::Understanding,
                role_prompt: UNDERSTANDING_PROMPT.to_string(),
                backend: AgentBackend::Chat(client),
            },
        }
    }

    pub fn generating_chat(client: ChatClient) -> Self {
        Self {
            config: AgentConfig {
                role: AgentRole::Generating,
                role_prompt: GENERATING_PROMPT.to_string(),
                backend: AgentBackend::Chat(client),
            },
        }
    }

    pub fn role(&self) -> AgentRole {
        self.config.role
    }

    /// Condenses a frame into an entry. Mock backends copy the frame
    /// attributes through the perception-noise knob; chat backends parse
    /// the returned keyword line, keeping out-of-vocabulary tokens
    /// verbatim for later repair. Time and location are attached here,
    /// transmitter-side.
    pub fn understand(&self, frame: &SceneDescriptor) -> Result<EntryRecord, AgentError> {
        if self.config.role != AgentRole::Understanding {
            return Err(AgentError::WrongRole {
                expected: "understanding",
            });
        }
        let attributes = match &self.config.backend {
            AgentBackend::Mock { flip_prob, seed } => {
                let mut rng = per_frame_rng(*seed, frame.frame_id);
                PERSON_SLOTS
                    .map(|slot| {
                        let truth = frame.attributes.token(slot);
                        if *flip_prob > 0.0 && rng.gen::<f64>() < *flip_prob {
                            let tokens = AttributeVocab::slot_tokens(slot);
                            tokens[rng.gen_range(0..tokens.len())].to_string()
                        } else {
                            truth.to_string()
                        }
                    })
                    .to_vec()
            }
            AgentBackend::Chat(client) => {
                let rendering = render_frame(frame);
                let response = client.call(&self.config.role_prompt, &rendering)?;
                parse_attribute_line(&response)?
            }
        };

        let mut it = attributes.into_iter();
        Ok(EntryRecord {
            time: frame.time.clone(),
            location: frame.location.clone(),
            gender: it.next().unwrap(),
            shirt_color: it.next().unwrap(),
            shirt_length: it.next().unwrap(),
            pants_color: it.next().unwrap(),
            pants_length: it.next().unwrap(),
            shoe_color: it.next().unwrap(),
        })
    }

    /// Expands an entry into the retrieval sentence, consulting and
    /// filling the short-term memory.
    pub fn generate(
        &self,
        entry: &EntryRecord,
        memory: &mut MemorySystem,
    ) -> Result<String, AgentError> {
        if self.config.role != AgentRole::Generating {
            return Err(AgentError::WrongRole {
                expected: "generating",
            });
        }
        let key = String::from_utf8(crate::corpus::serialize_entry(entry))
            .expect("entries serialize to ASCII");
        if let Some(cached) = memory.short_term_get(&key) {
            return Ok(cached);
        }
        let sentence = match &self.config.backend {
            AgentBackend::Mock { .. } => entry_sentence(entry),
            AgentBackend::Chat(client) => {
                client.call(&self.config.role_prompt, key.trim_end())?
            }
        };
        memory.short_term_insert(key, sentence.clone());
        Ok(sentence)
    }
}

/// Per-frame randomness independent of call order.
fn per_frame_rng(seed: u64, frame_id: u32) -> ChaCha20Rng {
    let mixed = seed ^ (u64::from(frame_id) + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    ChaCha20Rng::seed_from_u64(mixed)
}

/// Text rendering of a frame for chat backends.
fn render_frame(frame: &SceneDescriptor) -> String {
    format!(
        "frame {} at {} near {}: {}, {}, {}, {}, {}, {}",
        frame.frame_id,
        frame.time,
        frame.location,
        frame.attributes.gender,
        frame.attributes.shirt_color,
        frame.attributes.shirt_length,
        frame.attributes.pants_color,
        frame.attributes.pants_length,
        frame.attributes.shoe_color,
    )
}

/// Splits a backend keyword line into the six attribute tokens.
fn parse_attribute_line(response: &str) -> Result<Vec<String>, AgentError> {
    let trimmed = response.trim_end_matches(['\r', '\n']);
    if trimmed.contains('\n') || trimmed.contains('\r') {
        return Err(AgentError::MultiLineResponse);
    }
    let fields: Vec<String> = trimmed
        .split(',')
        .map(|f| f.trim().to_lowercase())
        .collect();
    if fields.len() != 6 {
        return Err(AgentError::BadFieldCount {
            found: fields.len(),
        });
    }
    Ok(fields)
}

/// The sentence template the generating agent instantiates.
pub fn entry_sentence(entry: &EntryRecord) -> String {
    let pronoun = if entry.gender == "male" { "He" } else { "She" };
    format!(
        "This is a {} person wearing a {} {} shirt, {} {} pants, and {} shoes. {} appeared at {} at {}.",
        entry.gender,
        entry.shirt_color,
        entry.shirt_length,
        entry.pants_color,
        entry.pants_length,
        entry.shoe_color,
        pronoun,
        entry.location,
        entry.time,
    )
}

/// The attribute half of the template, used as the retrieval reference
/// for a query (queries carry no time or location).
pub fn query_sentence(query: &Query) -> String {
    format!(
        "This is a {} person wearing a {} {} shirt, {} {} pants, and {} shoes.",
        query.gender,
        query.shirt_color,
        query.shirt_length,
        query.pants_color,
        query.pants_length,
        query.shoe_color,
    )
}

/// Human-readable slot name for reports.
pub fn slot_name(slot: Slot) -> &'static str {
    match slot {
        Slot::Gender => "gender",
        Slot::ShirtColor => "shirt color",
        Slot::ShirtLength => "shirt length",
        Slot::PantsColor => "pants color",
        Slot::PantsLength => "pants length",
        Slot::ShoeColor => "shoe color",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;
    use crate::corpus::gen_corpus;

    fn sample_frame() -> SceneDescriptor {
        let config = ExperimentConfig {
            master_seed: 1,
            frames: 4,
            payload_bytes: 8,
            ..ExperimentConfig::default()
        };
        gen_corpus(&config).unwrap().frames[0].clone()
    }

    #[test]
    fn zero_flip_probability_is_identity_perception() {
        let agent = Agent::understanding_mock(0.0, 7).unwrap();
        let frame = sample_frame();
        let entry = agent.understand(&frame).unwrap();
        assert_eq!(entry, frame.ground_truth_entry());
    }

    #[test]
    fn flip_rate_matches_the_expected_disagreement() {
        let config = ExperimentConfig {
            master_seed: 3,
            frames: 10_000,
            payload_bytes: 1,
            ..ExperimentConfig::default()
        };
        let corpus = gen_corpus(&config).unwrap();
        let agent = Agent::understanding_mock(0.5, 11).unwrap();

        let mut disagreements = vec![0usize; 6];
        for frame in &corpus.frames {
            let entry = agent.understand(frame).unwrap();
            for (i, slot) in PERSON_SLOTS.iter().enumerate() {
                if entry.person_token(*slot) != frame.attributes.token(*slot) {
                    disagreements[i] += 1;
                }
            }
        }
        for (i, slot) in PERSON_SLOTS.iter().enumerate() {
            let vocab = AttributeVocab::slot_tokens(*slot).len() as f64;
            let expected = 0.5 * (vocab - 1.0) / vocab;
            let measured = disagreements[i] as f64 / corpus.frames.len() as f64;
            assert!(
                (measured - expected).abs() < 0.02,
                "slot {i}: measured {measured}, expected {expected}"
            );
        }
    }

    #[test]
    fn mock_understanding_is_order_independent() {
        let agent = Agent::understanding_mock(0.9, 5).unwrap();
        let config = ExperimentConfig {
            master_seed: 2,
            frames: 6,
            payload_bytes: 1,
            ..ExperimentConfig::default()
        };
        let corpus = gen_corpus(&config).unwrap();
        let forward: Vec<_> = corpus
            .frames
            .iter()
            .map(|f| agent.understand(f).unwrap())
            .collect();
        let backward: Vec<_> = corpus
            .frames
            .iter()
            .rev()
            .map(|f| agent.understand(f).unwrap())
            .collect();
        for (a, b) in forward.iter().zip(backward.iter().rev()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn template_instantiation_matches_the_reference_sentence() {
        let entry = EntryRecord {
            time: "12:00:05".into(),
            location: "gate-3".into(),
            gender: "male".into(),
            shirt_color: "white".into(),
            shirt_length: "long".into(),
            pants_color: "black".into(),
            pants_length: "long".into(),
            shoe_color: "black".into(),
        };
        assert_eq!(
            entry_sentence(&entry),
            "This is a male person wearing a white long shirt, black long pants, and black shoes. He appeared at gate-3 at 12:00:05."
        );
    }

    #[test]
    fn female_entries_use_she() {
        let entry = EntryRecord {
            time: "08:10:00".into(),
            location: "gate-1".into(),
            gender: "female".into(),
            shirt_color: "red".into(),
            shirt_length: "short".into(),
            pants_color: "blue".into(),
            pants_length: "long".into(),
            shoe_color: "white".into(),
        };
        assert!(entry_sentence(&entry).contains("She appeared at gate-1 at 08:10:00."));
    }

    #[test]
    fn generating_uses_and_fills_short_term_memory() {
        let agent = Agent::generating_mock();
        let mut memory = MemorySystem::new(16);
        let frame = sample_frame();
        let entry = frame.ground_truth_entry();

        let first = agent.generate(&entry, &mut memory).unwrap();
        assert_eq!(memory.short_term_len(), 1);
        let second = agent.generate(&entry, &mut memory).unwrap();
        assert_eq!(first, second);
        assert_eq!(memory.short_term_len(), 1);
    }

    #[test]
    fn roles_are_enforced() {
        let frame = sample_frame();
        let generator = Agent::generating_mock();
        assert!(matches!(
            generator.understand(&frame),
            Err(AgentError::WrongRole { .. })
        ));
        let understander = Agent::understanding_mock(0.0, 1).unwrap();
        let mut memory = MemorySystem::new(4);
        assert!(matches!(
            understander.generate(&frame.ground_truth_entry(), &mut memory),
            Err(AgentError::WrongRole { .. })
        ));
    }

    #[test]
    fn invalid_flip_probability_is_rejected() {
        assert!(matches!(
            Agent::understanding_mock(1.0, 0),
            Err(AgentError::InvalidFlipProb(_))
        ));
    }

    #[test]
    fn attribute_lines_with_wrong_arity_are_format_errors() {
        assert!(matches!(
            parse_attribute_line("male, white, long"),
            Err(AgentError::BadFieldCount { found: 3 })
        ));
        assert!(matches!(
            parse_attribute_line("a, b, c\nd, e, f"),
            Err(AgentError::MultiLineResponse)
        ));
        let ok = parse_attribute_line("Male, WHITE, long, black, long, black\n").unwrap();
        assert_eq!(ok[0], "male");
        assert_eq!(ok[1], "white");
    }
}
