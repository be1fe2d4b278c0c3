use semcom::agents::{entry_sentence, query_sentence};
use semcom::config::ExperimentConfig;
use semcom::corpus::gen_corpus;
use semcom::pipeline::calibrate_threshold;
use semcom::transformer::{cosine, embed_text, AttentionParams};

fn main() {
    let config = ExperimentConfig { master_seed: 1, frames: 64, payload_bytes: 8, ..ExperimentConfig::default() };
    let corpus = gen_corpus(&config).unwrap();
    for seed in [1u64, 2, 3] {
        let head = AttentionParams::seeded(seed);
        let qe = embed_text(&query_sentence(&corpus.query), &head).unwrap();
        let mut pos: Vec<f64> = vec![];
        let mut neg: Vec<f64> = vec![];
        for (frame, label) in corpus.frames.iter().zip(&corpus.labels) {
            let s = entry_sentence(&frame.ground_truth_entry());
            let c = cosine(&embed_text(&s, &head).unwrap(), &qe);
            if *label { pos.push(c) } else { neg.push(c) }
        }
        pos.sort_by(|a, b| a.partial_cmp(b).unwrap());
        neg.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let cal = calibrate_threshold(&corpus, &head, 1).unwrap();
        println!("seed {seed}: pos [{:.3}, {:.3}]  neg [{:.3}, {:.3}]  gap {:.4}  theta {:.2} f1 {:.3}",
            pos[0], pos[pos.len()-1], neg[0], neg[neg.len()-1], pos[0] - neg[neg.len()-1],
            cal.threshold, cal.f1_holdout);
        // pairwise ranking rate
        let mut ok = 0; let mut total = 0;
        for p in &pos { for n in &neg { total += 1; if p > n { ok += 1; } } }
        println!("         pairwise ranking: {:.4}", ok as f64 / total as f64);
    }
}
