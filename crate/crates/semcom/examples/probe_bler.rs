use rand::prelude::*;
use rand_chacha::ChaCha20Rng;
use semcom::channel::{awgn, snr_to_n0, ChannelConfig};
use semcom::phy::{ldpc_build, ldpc_decode, ldpc_encode, qam16_demap_llr, qam16_map, BitBlock};

fn main() {
    for (n, trials) in [(510usize, 20000u64), (1026, 20000)] {
        let code = ldpc_build(n, 1).unwrap();
        println!("n={} k={}", code.n(), code.k());
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for snr in [6.0, 9.0, 12.0] {
            let mut block_errors = 0usize;
            for t in 0..trials {
                let msg = BitBlock::new((0..code.k()).map(|_| rng.gen_range(0..2u8)).collect()).unwrap();
                let cw = ldpc_encode(&code, &msg).unwrap();
                let mut bits = cw.clone();
                bits.pad_to_multiple(4);
                let sym = qam16_map(&bits).unwrap();
                let noisy = awgn(&sym.symbols, &ChannelConfig::new(snr, 1000 + t).unwrap());
                let llr = qam16_demap_llr(&noisy, snr_to_n0(snr)).unwrap();
                let res = ldpc_decode(&code, &llr[..code.n()], 50).unwrap();
                if res.message != msg { block_errors += 1; }
            }
            println!("  snr {snr}: BLER {:.6} ({block_errors}/{trials})", block_errors as f64 / trials as f64);
        }
    }
}
