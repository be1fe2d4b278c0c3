//! Vocabulary-constrained token repair: damaged tokens snap to the
//! nearest in-slot vocabulary word by edit distance.

use crate::corpus::{is_valid_time, AttributeVocab, EntryParse, EntryRecord, PERSON_SLOTS};

/// Classic dynamic-programming Levenshtein distance.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut current = vec![0usize; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        current[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let substitution = prev[j] + usize::from(ca != cb);
            current[j + 1] = substitution.min(prev[j + 1] + 1).min(current[j] + 1);
        }
        std::mem::swap(&mut prev, &mut current);
    }
    prev[b.len()]
}

fn nearest_token(damaged: &str, vocabulary: &[&'static str]) -> String {
    let mut best = vocabulary[0];
    let mut best_distance = usize::MAX;
    for token in vocabulary {
        let distance = levenshtein(damaged, token);
        // Ties break lexicographically; the vocabulary scan keeps the
        // smaller token only on a strict improvement, so pre-sorting by
        // token makes "first wins" lexicographic.
        if distance < best_distance || (distance == best_distance && *token < best) {
            best = token;
            best_distance = distance;
        }
    }
    best.to_string()
}

/// Replaces every out-of-vocabulary token with the in-slot vocabulary
/// token at minimum Levenshtein distance (ties lexicographic). In-vocab
/// tokens pass through untouched, so valid entries are fixed points and
/// the operation is idempotent.
///
/// The time field has no vocabulary; a malformed time is reset to
/// `00:00:00` so the repaired entry always serializes canonically.
pub fn repair_tokens(parsed: &EntryParse) -> EntryRecord {
    let mut entry = parsed.entry().clone();

    if !is_valid_time(&entry.time) {
        entry.time = "00:00:00".to_string();
    }
    if !AttributeVocab::is_location(&entry.location) {
        entry.location = nearest_token(&entry.location, AttributeVocab::locations());
    }
    for slot in PERSON_SLOTS {
        let token = entry.person_token(slot);
        if !AttributeVocab::contains(slot, token) {
            let repaired = nearest_token(token, AttributeVocab::slot_tokens(slot));
            *entry.person_token_mut(slot) = repaired;
        }
    }
    entry
}
