//! AWGN channel, SNR bookkeeping, and the analog latent transport used by
//! the JSCC baselines.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("snr_db must be finite or the +inf noiseless sentinel")]
    InvalidSnr,
    #[error("analog transmit vector must be non-empty and non-zero")]
    DegenerateGain,
}

/// Channel operating point: Es/N0 per complex symbol in dB, plus the seed
/// for the noise draw. `snr_db = +inf` disables noise entirely.
#[derive(Debug, Clone, Copy)]
pub struct ChannelConfig {
    pub snr_db: f64,
    pub seed: u64,
}

impl ChannelConfig {
    pub fn new(snr_db: f64, seed: u64) -> Result<Self, ChannelError> {
        if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
            return Err(ChannelError::InvalidSnr);
        }
        Ok(Self { snr_db, seed })
    }
}

/// Noise spectral density for unit symbol energy: n0 = 10^(-snr_db / 10).
pub fn snr_to_n0(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

/// Adds i.i.d. complex Gaussian noise with variance n0/2 per real
/// dimension. Deterministic given the config seed; the +inf sentinel
/// returns the input untouched.
pub fn awgn(symbols: &[Complex64], config: &ChannelConfig) -> Vec<Complex64> {
    if config.snr_db == f64::INFINITY {
        return symbols.to_vec();
    }
    let sigma = (snr_to_n0(config.snr_db) / 2.0).sqrt();
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    symbols
        .iter()
        .map(|s| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            s + Complex64::new(re * sigma, im * sigma)
        })
        .collect()
}

/// A latent vector after the analog channel, with the transmit gain kept
/// as known side information (charged 32 bits of overhead by the
/// accounting layer).
#[derive(Debug, Clone)]
pub struct ReceivedLatent {
    pub values: Vec<f64>,
    pub gain: f64,
}

/// Normalizes a real vector by its RMS and packs consecutive pairs into
/// complex symbols. Odd lengths are padded with one zero.
///
/// The normalized reals have unit mean square, i.e. unit average power
/// per real dimension; each complex symbol therefore carries two unit
/// power reals.
pub fn analog_tx(v: &[f64]) -> Result<(Vec<Complex64>, f64), ChannelError> {
    if v.is_empty() {
        return Err(ChannelError::DegenerateGain);
    }
    let gain = (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt();
    if gain == 0.0 || !gain.is_finite() {
        return Err(ChannelError::DegenerateGain);
    }
    let mut scaled: Vec<f64> = v.iter().map(|x| x / gain).collect();
    if scaled.len() % 2 == 1 {
        scaled.push(0.0);
    }
    let symbols = scaled
        .chunks(2)
        .map(|pair| Complex64::new(pair[0], pair[1]))
        .collect();
    Ok((symbols, gain))
}

/// Undoes [`analog_tx`]: unpacks symbol components, multiplies the gain
/// back, and truncates to the original length `out_len`.
pub fn analog_rx(received: &[Complex64], gain: f64, out_len: usize) -> Vec<f64> {
    let mut values = Vec::with_capacity(received.len() * 2);
    for s in received {
        values.push(s.re * gain);
        values.push(s.im * gain);
    }
    values.truncate(out_len);
    values
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn snr_to_n0_reference_points() {
        assert_eq!(snr_to_n0(0.0), 1.0);
        assert!((snr_to_n0(10.0) - 0.1).abs() < 1e-15);
        assert!((snr_to_n0(3.0) - 0.501187233627272).abs() < 1e-12);
    }

    #[test]
    fn noiseless_sentinel_is_identity() {
        let symbols = vec![Complex64::new(0.3, -0.8), Complex64::new(-1.0, 0.1)];
        let config = ChannelConfig::new(f64::INFINITY, 5).unwrap();
        assert_eq!(awgn(&symbols, &config), symbols);
    }

    #[test]
    fn equal_seeds_give_identical_noise() {
        let symbols = vec![Complex64::new(1.0, 0.0); 64];
        let config = ChannelConfig::new(10.0, 99).unwrap();
        assert_eq!(awgn(&symbols, &config), awgn(&symbols, &config));
    }

    #[test]
    fn empirical_noise_variance_matches_n0() {
        let symbols = vec![Complex64::new(0.0, 0.0); 1_000_000];
        let config = ChannelConfig::new(10.0, 17).unwrap();
        let noisy = awgn(&symbols, &config);
        let power: f64 = noisy.iter().map(|s| s.norm_sqr()).sum::<f64>() / noisy.len() as f64;
        assert!(
            (power - 0.1).abs() / 0.1 < 0.01,
            "measured noise power {power}"
        );
    }

    #[test]
    fn analog_round_trip_is_exact_on_a_clean_channel() {
        let mut rng = ChaCha20Rng::seed_from_u64(41);
        let v: Vec<f64> = (0..16).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let (symbols, gain) = analog_tx(&v).unwrap();
        let back = analog_rx(&symbols, gain, v.len());
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn odd_length_pads_to_one_extra_symbol() {
        let v: Vec<f64> = (1..=9).map(f64::from).collect();
        let (symbols, gain) = analog_tx(&v).unwrap();
        assert_eq!(symbols.len(), 5);
        let back = analog_rx(&symbols, gain, 9);
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn transmitted_power_per_real_dimension_is_unit() {
        let mut rng = ChaCha20Rng::seed_from_u64(42);
        let v: Vec<f64> = (0..1024).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let (symbols, _) = analog_tx(&v).unwrap();
        let mean_square: f64 =
            symbols.iter().map(|s| s.norm_sqr()).sum::<f64>() / (2.0 * symbols.len() as f64);
        assert!((0.99..=1.01).contains(&mean_square), "power {mean_square}");
    }

    #[test]
    fn all_zero_vector_is_a_degenerate_gain_error() {
        assert!(matches!(
            analog_tx(&[0.0, 0.0]),
            Err(ChannelError::DegenerateGain)
        ));
        assert!(matches!(analog_tx(&[]), Err(ChannelError::DegenerateGain)));
    }

    #[test]
    fn end_to_end_analog_mse_matches_gain_squared_n0_over_two() {
        let mut rng = ChaCha20Rng::seed_from_u64(43);
        let dim = 10;
        let snr_db = 6.0;
        let n0 = snr_to_n0(snr_db);
        let mut total_sq = 0.0;
        let mut count = 0usize;
        let mut expected = 0.0;
        for trial in 0..10_000u64 {
            let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let (symbols, gain) = analog_tx(&v).unwrap();
            let config = ChannelConfig::new(snr_db, 1000 + trial).unwrap();
            let noisy = awgn(&symbols, &config);
            let back = analog_rx(&noisy, gain, dim);
            for (a, b) in v.iter().zip(&back) {
                total_sq += (a - b) * (a - b);
            }
            expected += gain * gain * n0 / 2.0 * dim as f64;
            count += dim;
        }
        let mse = total_sq / count as f64;
        let expected = expected / count as f64;
        assert!(
            (mse - expected).abs() / expected < 0.05,
            "mse {mse}, expected {expected}"
        );
    }
}
