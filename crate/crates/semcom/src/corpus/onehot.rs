//! One-hot coding of the six person-attribute groups.

use super::gen::PersonAttributes;
use super::vocab::{AttributeVocab, PERSON_SLOTS};
use super::CorpusError;

/// Total one-hot dimension across the six groups.
pub const ONEHOT_DIM: usize = 30;

/// Group sizes in slot order: gender, shirt color, shirt length, pants
/// color, pants length, shoe color.
pub const GROUP_SIZES: [usize; 6] = [2, 8, 2, 8, 2, 8];

/// Encodes the six person attributes as a 30-dimensional one-hot vector,
/// one active coordinate per slot group.
pub fn encode_onehot(attrs: &PersonAttributes) -> Vec<f64> {
    let mut v = vec![0.0; ONEHOT_DIM];
    let mut offset = 0;
    for slot in PERSON_SLOTS {
        let tokens = AttributeVocab::slot_tokens(slot);
        let idx = AttributeVocab::token_index(slot, attrs.token(slot))
            .expect("corpus attributes are in vocabulary");
        v[offset + idx] = 1.0;
        offset += tokens.len();
    }
    v
}

/// Decodes a real vector back to attribute tokens by per-group argmax.
/// Ties break toward the lowest index.
pub fn decode_onehot(v: &[f64]) -> Result<PersonAttributes, CorpusError> {
    if v.len() != ONEHOT_DIM {
        return Err(CorpusError::Shape {
            expected: ONEHOT_DIM,
            found: v.len(),
        });
    }
    let mut tokens = Vec::with_capacity(6);
    let mut offset = 0;
    for slot in PERSON_SLOTS {
        let group = AttributeVocab::slot_tokens(slot);
        let mut best = 0;
        for (i, value) in v[offset..offset + group.len()].iter().enumerate() {
            if *value > v[offset + best] {
                best = i;
            }
        }
        tokens.push(group[best].to_string());
        offset += group.len();
    }
    let mut it = tokens.into_iter();
    Ok(PersonAttributes {
        gender: it.next().unwrap(),
        shirt_color: it.next().unwrap(),
        shirt_length: it.next().unwrap(),
        pants_color: it.next().unwrap(),
        pants_length: it.next().unwrap(),
        shoe_color: it.next().unwrap(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;
    use crate::corpus::gen::gen_corpus;

    #[test]
    fn encode_decode_is_identity_on_corpus_frames() {
        let config = ExperimentConfig {
            master_seed: 1,
            frames: 64,
            payload_bytes: 16,
            ..ExperimentConfig::default()
        };
        let corpus = gen_corpus(&config).unwrap();
        for frame in &corpus.frames {
            let v = encode_onehot(&frame.attributes);
            assert_eq!(decode_onehot(&v).unwrap(), frame.attributes);
        }
    }

    #[test]
    fn all_zeros_decodes_to_first_token_of_each_group() {
        let attrs = decode_onehot(&vec![0.0; ONEHOT_DIM]).unwrap();
        assert_eq!(attrs.gender, "male");
        assert_eq!(attrs.shirt_color, "white");
        assert_eq!(attrs.shirt_length, "long");
        assert_eq!(attrs.pants_color, "white");
        assert_eq!(attrs.pants_length, "long");
        assert_eq!(attrs.shoe_color, "white");
    }

    #[test]
    fn encoding_has_l1_norm_six() {
        let config = ExperimentConfig {
            master_seed: 5,
            frames: 8,
            payload_bytes: 16,
            ..ExperimentConfig::default()
        };
        let corpus = gen_corpus(&config).unwrap();
        for frame in &corpus.frames {
            let v = encode_onehot(&frame.attributes);
            let l1: f64 = v.iter().map(|x| x.abs()).sum();
            assert_eq!(l1, 6.0);
        }
    }

    #[test]
    fn group_sizes_match_the_vocabularies() {
        use crate::corpus::vocab::{AttributeVocab, PERSON_SLOTS};
        for (slot, size) in PERSON_SLOTS.iter().zip(GROUP_SIZES) {
            assert_eq!(AttributeVocab::slot_tokens(*slot).len(), size);
        }
        assert_eq!(GROUP_SIZES.iter().sum::<usize>(), ONEHOT_DIM);
    }

    #[test]
    fn wrong_dimension_is_a_shape_error() {
        assert!(matches!(
            decode_onehot(&[0.0; 29]),
            Err(CorpusError::Shape {
                expected: 30,
                found: 29
            })
        ));
    }
}
