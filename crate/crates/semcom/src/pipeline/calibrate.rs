//! Retrieval-threshold calibration for the sentence-similarity head.

use rand::prelude::*;
use rand_chacha::ChaCha20Rng;

use crate::agents::{entry_sentence, query_sentence};
use crate::corpus::Corpus;
use crate::transformer::{cosine, embed_text, AttentionParams};

use super::PipelineError;

/// Calibration outcome: the frozen threshold and its held-out F1.
#[derive(Debug, Clone, Copy)]
pub struct Calibration {
    pub threshold: f64,
    pub f1_holdout: f64,
}

/// Splits the corpus 50/50 by seeded shuffle, scores clean template
/// sentences against the query sentence, and picks the threshold from
/// {0.50, 0.51, ..., 0.99} maximizing F1 on the calibration half (ties
/// resolve to the smallest threshold). The threshold is frozen for every
/// sweep cell.
pub fn calibrate_threshold(
    corpus: &Corpus,
    head: &AttentionParams,
    split_seed: u64,
) -> Result<Calibration, PipelineError> {
    let mut indices: Vec<usize> = (0..corpus.frames.len()).collect();
    let mut rng = ChaCha20Rng::seed_from_u64(split_seed);
    indices.shuffle(&mut rng);
    let half = corpus.frames.len() / 2;
    let (calibration, holdout) = indices.split_at(half);

    if !calibration.iter().any(|i| corpus.labels[*i])
        || !holdout.iter().any(|i| corpus.labels[*i])
    {
        return Err(PipelineError::Calibration(
            "a split half contains no positive frames".into(),
        ));
    }

    let query_embedding = embed_text(&query_sentence(&corpus.query), head)?;
    let score = |idx: usize| -> Result<f64, PipelineError> {
        let sentence = entry_sentence(&corpus.frames[idx].ground_truth_entry());
        Ok(cosine(&embed_text(&sentence, head)?, &query_embedding))
    };

    let calibration_scores: Vec<(f64, bool)> = calibration
        .iter()
        .map(|i| Ok((score(*i)?, corpus.labels[*i])))
        .collect::<Result<_, PipelineError>>()?;

    let mut best_threshold = 0.50;
    let mut best_f1 = f64::NEG_INFINITY;
    for step in 0..50 {
        let threshold = 0.50 + step as f64 * 0.01;
        let f1 = f1_at(&calibration_scores, threshold);
        if f1 > best_f1 {
            best_f1 = f1;
            best_threshold = threshold;
        }
    }

    let holdout_scores: Vec<(f64, bool)> = holdout
        .iter()
        .map(|i| Ok((score(*i)?, corpus.labels[*i])))
        .collect::<Result<_, PipelineError>>()?;
    let f1_holdout = f1_at(&holdout_scores, best_threshold);

    Ok(Calibration {
        threshold: best_threshold,
        f1_holdout,
    })
}

fn f1_at(scores: &[(f64, bool)], threshold: f64) -> f64 {
    let (mut tp, mut f_p, mut f_n) = (0usize, 0usize, 0usize);
    for (score, label) in scores {
        let predicted = *score >= threshold;
        match (predicted, label) {
            (true, true) => tp += 1,
            (true, false) => f_p += 1,
            (false, true) => f_n += 1,
            (false, false) => {}
        }
    }
    if tp == 0 {
        return 0.0;
    }
    2.0 * tp as f64 / (2.0 * tp as f64 + f_p as f64 + f_n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;
    use crate::corpus::gen_corpus;

    fn world(frames: usize) -> (Corpus, AttentionParams) {
        let config = ExperimentConfig {
            master_seed: 1,
            frames,
            payload_bytes: 8,
            ..ExperimentConfig::default()
        };
        (gen_corpus(&config).unwrap(), AttentionParams::seeded(1))
    }

    #[test]
    fn calibration_is_deterministic() {
        let (corpus, head) = world(64);
        let a = calibrate_threshold(&corpus, &head, 1).unwrap();
        let b = calibrate_threshold(&corpus, &head, 1).unwrap();
        assert_eq!(a.threshold, b.threshold);
        assert_eq!(a.f1_holdout, b.f1_holdout);
    }

    #[test]
    fn threshold_lies_on_the_grid() {
        let (corpus, head) = world(64);
        let calibration = calibrate_threshold(&corpus, &head, 1).unwrap();
        let steps = (calibration.threshold - 0.50) / 0.01;
        assert!((steps - steps.round()).abs() < 1e-9);
        assert!((0.50..=0.99).contains(&calibration.threshold));
    }

    #[test]
    fn plateau_ties_resolve_to_the_smallest_threshold() {
        // Scores split cleanly: every threshold in the grid below the
        // positive cluster gives identical F1, so the smallest wins.
        let scores = vec![(0.995, true), (0.99, true), (0.3, false), (0.2, false)];
        let mut best = 0.50;
        let mut best_f1 = f64::NEG_INFINITY;
        for step in 0..50 {
            let threshold = 0.50 + step as f64 * 0.01;
            let f1 = f1_at(&scores, threshold);
            if f1 > best_f1 {
                best_f1 = f1;
                best = threshold;
            }
        }
        assert_eq!(best, 0.50);
        assert_eq!(best_f1, 1.0);
    }

    #[test]
    fn degenerate_splits_are_errors() {
        let config = ExperimentConfig {
            master_seed: 1,
            frames: 2,
            payload_bytes: 8,
            ..ExperimentConfig::default()
        };
        // Two frames, one positive: some split half has no positive.
        let corpus = gen_corpus(&config).unwrap();
        let head = AttentionParams::seeded(1);
        assert!(matches!(
            calibrate_threshold(&corpus, &head, 1),
            Err(PipelineError::Calibration(_))
        ));
    }
}
