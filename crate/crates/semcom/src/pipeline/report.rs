//! CSV serialization of run records and the per-scheme summary.

use std::collections::BTreeMap;

use crate::config::SchemeId;

use super::schemes::RunRecord;
use super::PipelineError;

pub const RESULTS_HEADER: &str =
    "scheme,snr_db,rep,accuracy,overhead_bits,frames_failed,empty_retrieval_flag";
pub const SUMMARY_HEADER: &str = "scheme,mean_accuracy,stddev_across_snr,total_overhead_bits";

/// Fixed-format results CSV; formatting is deterministic so identical
/// sweeps serialize byte-identically.
pub fn results_to_csv(records: &[RunRecord]) -> String {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{:.3},{},{:.6},{},{},{}\n",
            r.scheme,
            r.snr_db,
            r.rep,
            r.accuracy,
            r.overhead_bits,
            r.frames_failed,
            u8::from(r.empty_retrieval),
        ));
    }
    out
}

/// Parses a results CSV back into records (retrieved frame ids are not
/// serialized and come back empty).
pub fn parse_results_csv(text: &str) -> Result<Vec<RunRecord>, PipelineError> {
    let mut records = Vec::new();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == RESULTS_HEADER => {}
        other => {
            return Err(PipelineError::MalformedCsv {
                line: 1,
                reason: format!("bad header {other:?}"),
            })
        }
    }
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(PipelineError::MalformedCsv {
                line: idx + 1,
                reason: format!("{} fields, expected 7", fields.len()),
            });
        }
        let parse_err = |reason: &str| PipelineError::MalformedCsv {
            line: idx + 1,
            reason: reason.to_string(),
        };
        records.push(RunRecord {
            scheme: fields[0].parse().map_err(|_| parse_err("bad scheme"))?,
            snr_db: fields[1].parse().map_err(|_| parse_err("bad snr"))?,
            rep: fields[2].parse().map_err(|_| parse_err("bad rep"))?,
            accuracy: fields[3].parse().map_err(|_| parse_err("bad accuracy"))?,
            overhead_bits: fields[4].parse().map_err(|_| parse_err("bad overhead"))?,
            frames_failed: fields[5].parse().map_err(|_| parse_err("bad failures"))?,
            empty_retrieval: fields[6] == "1",
            retrieved_ids: Vec::new(),
        });
    }
    Ok(records)
}

/// Per-scheme aggregate: mean accuracy over every cell, the standard
/// deviation of the per-SNR mean accuracies (the robustness bar), and the
/// total overhead.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummaryRow {
    pub scheme: SchemeId,
    pub mean_accuracy: f64,
    pub stddev_across_snr: f64,
    pub total_overhead_bits: u64,
}

pub fn summarize(records: &[RunRecord]) -> Vec<SweepSummaryRow> {
    let mut by_scheme: BTreeMap<SchemeId, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        by_scheme.entry(r.scheme).or_default().push(r);
    }

    by_scheme
        .into_iter()
        .map(|(scheme, rows)| {
            let mean_accuracy =
                rows.iter().map(|r| r.accuracy).sum::<f64>() / rows.len() as f64;

            // Group by SNR point (keyed by the canonical 3-decimal form),
            // average within each point, then take the population stddev
            // across point means.
            let mut by_snr: BTreeMap<String, Vec<f64>> = BTreeMap::new();
            for r in &rows {
                by_snr
                    .entry(format!("{:.3}", r.snr_db))
                    .or_default()
                    .push(r.accuracy);
            }
            let snr_means: Vec<f64> = by_snr
                .values()
                .map(|accs| accs.iter().sum::<f64>() / accs.len() as f64)
                .collect();
            let grand = snr_means.iter().sum::<f64>() / snr_means.len() as f64;
            let variance = snr_means
                .iter()
                .map(|m| (m - grand) * (m - grand))
                .sum::<f64>()
                / snr_means.len() as f64;

            SweepSummaryRow {
                scheme,
                mean_accuracy,
                stddev_across_snr: variance.sqrt(),
                total_overhead_bits: rows.iter().map(|r| r.overhead_bits).sum(),
            }
        })
        .collect()
}

pub fn summary_to_csv(rows: &[SweepSummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{:.6},{:.6},{}\n",
            r.scheme, r.mean_accuracy, r.stddev_across_snr, r.total_overhead_bits,
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(scheme: SchemeId, snr_db: f64, rep: usize, accuracy: f64) -> RunRecord {
        RunRecord {
            scheme,
            snr_db,
            rep,
            retrieved_ids: Vec::new(),
            accuracy,
            overhead_bits: 100,
            frames_failed: 0,
            empty_retrieval: accuracy == 0.0,
        }
    }

    #[test]
    fn csv_round_trips() {
        let records = vec![
            record(SchemeId::Traditional, 3.0, 0, 0.0),
            record(SchemeId::Generative, 9.0, 1, 0.875),
        ];
        let csv = results_to_csv(&records);
        let parsed = parse_results_csv(&csv).unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[0].scheme, SchemeId::Traditional);
        assert_eq!(parsed[1].accuracy, 0.875);
        assert!(parsed[0].empty_retrieval);
        assert!(!parsed[1].empty_retrieval);
    }

    #[test]
    fn malformed_csv_is_rejected_with_line_numbers() {
        assert!(matches!(
            parse_results_csv("nonsense\n"),
            Err(PipelineError::MalformedCsv { line: 1, .. })
        ));
        let bad = format!("{RESULTS_HEADER}\nvae,9.000,0,zero,1,2,0\n");
        assert!(matches!(
            parse_results_csv(&bad),
            Err(PipelineError::MalformedCsv { line: 2, .. })
        ));
    }

    #[test]
    fn constant_accuracy_has_zero_stddev() {
        let records: Vec<RunRecord> = (0..10)
            .flat_map(|snr_step| {
                (0..3).map(move |rep| {
                    record(SchemeId::Vae, (3 * (snr_step + 1)) as f64, rep, 0.75)
                })
            })
            .collect();
        let summary = summarize(&records);
        assert_eq!(summary.len(), 1);
        assert_eq!(summary[0].stddev_across_snr, 0.0);
        assert!((summary[0].mean_accuracy - 0.75).abs() < 1e-12);
        assert_eq!(summary[0].total_overhead_bits, 3000);
    }

    #[test]
    fn stddev_is_across_snr_point_means() {
        // Two SNR points with within-point variation: only the means
        // (0.5 and 1.0) enter the spread.
        let records = vec![
            record(SchemeId::Dm, 3.0, 0, 0.4),
            record(SchemeId::Dm, 3.0, 1, 0.6),
            record(SchemeId::Dm, 30.0, 0, 1.0),
            record(SchemeId::Dm, 30.0, 1, 1.0),
        ];
        let summary = summarize(&records);
        assert!((summary[0].stddev_across_snr - 0.25).abs() < 1e-12);
    }
}
