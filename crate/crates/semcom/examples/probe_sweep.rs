use semcom::config::{ExperimentConfig, SchemeId};
use semcom::corpus::gen_corpus;
use semcom::pipeline::{summarize, sweep, train_models, LlmRuntime};

fn main() {
    let config = ExperimentConfig {
        master_seed: 1,
        frames: 64,
        payload_bytes: 1024,
        reps: 5,
        ldpc_n: 1024,
        ..ExperimentConfig::default()
    };
    let t0 = std::time::Instant::now();
    let corpus = gen_corpus(&config).unwrap();
    let models = train_models(&corpus, config.latent_dim, config.master_seed).unwrap();
    println!("setup: {:?}", t0.elapsed());

    let t1 = std::time::Instant::now();
    let (records, calibration) = sweep(&config, &corpus, &models, &LlmRuntime::default()).unwrap();
    println!("sweep: {:?}  threshold {}  f1 {:.3}", t1.elapsed(), calibration.threshold, calibration.f1_holdout);

    // per-(scheme, snr) mean accuracy
    for scheme in SchemeId::ALL {
        print!("{:>12}: ", scheme.as_str());
        for snr_step in 1..=10 {
            let snr = (3 * snr_step) as f64;
            let cells: Vec<&_> = records.iter().filter(|r| r.scheme == scheme && r.snr_db == snr).collect();
            let mean: f64 = cells.iter().map(|r| r.accuracy).sum::<f64>() / cells.len() as f64;
            print!("{:.2} ", mean);
        }
        println!();
    }
    for row in summarize(&records) {
        println!("{:>12}: mean {:.4}  stddev {:.4}  overhead {}", row.scheme.as_str(), row.mean_accuracy, row.stddev_across_snr, row.total_overhead_bits);
    }
    // frame success rate for traditional per snr
    print!("trad success: ");
    for snr_step in 1..=10 {
        let snr = (3 * snr_step) as f64;
        let cells: Vec<&_> = records.iter().filter(|r| r.scheme == SchemeId::Traditional && r.snr_db == snr).collect();
        let fail: f64 = cells.iter().map(|r| r.frames_failed as f64).sum::<f64>() / cells.len() as f64;
        print!("{:.2} ", 1.0 - fail / 64.0);
    }
    println!();
}
