use semcom::codecs::vae::{reconstruction_accuracy, vae_train, VaeTrainConfig};
use semcom::config::ExperimentConfig;
use semcom::corpus::{encode_onehot, gen_corpus};

fn main() {
    for (frames, init, seed) in [
        (200usize, 1.5f64, 0u64), (200, 2.0, 0), (200, 1.0, 1), (200, 1.0, 2), (200, 1.0, 3),
        (100, 1.0, 0), (64, 1.0, 1), (64, 1.0, 2), (64, 0.5, 0), (48, 1.0, 0),
    ] {
        let config = ExperimentConfig { master_seed: 1, frames, payload_bytes: 8, ..ExperimentConfig::default() };
        let corpus = gen_corpus(&config).unwrap();
        let data: Vec<Vec<f64>> = corpus.frames.iter().map(|f| encode_onehot(&f.attributes)).collect();
        let labeled: Vec<(Vec<f64>, _)> = corpus.frames.iter().map(|f| (encode_onehot(&f.attributes), f.attributes.clone())).collect();
        let hyper = VaeTrainConfig { seed, init_scale: init, ..VaeTrainConfig::default() };
        let trained = vae_train(&data, 8, &hyper).unwrap();
        let acc = reconstruction_accuracy(&trained.params, &labeled).unwrap();
        println!("frames={frames} init={init} seed={seed}: final loss {:.4}, acc {:.4}", trained.loss_trace.last().unwrap(), acc);
    }
}
