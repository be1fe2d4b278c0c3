//! Gray-coded 16-QAM mapping and exact soft demapping.

use num_complex::Complex64;

use super::bits::BitBlock;
use super::PhyError;

/// Per-axis Gray mapping of a bit pair to an unscaled level.
/// 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
fn gray_level(b_hi: u8, b_lo: u8) -> f64 {
    match (b_hi, b_lo) {
        (0, 0) => -3.0,
        (0, 1) => -1.0,
        (1, 1) => 1.0,
        (1, 0) => 3.0,
        _ => unreachable!("bits are binary"),
    }
}

/// Levels indexed by the bit pair value `(b_hi << 1) | b_lo`.
const LEVELS: [f64; 4] = [-3.0, -1.0, 1.0, 3.0];
const LEVEL_BITS: [(u8, u8); 4] = [(0, 0), (0, 1), (1, 1), (1, 0)];

fn scale() -> f64 {
    1.0 / 10f64.sqrt()
}

/// Unit-average-energy 16-QAM symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct QamSymbolVector {
    pub symbols: Vec<Complex64>,
}

/// Maps bits to 16-QAM symbols, four bits per symbol: (b0 b1) select the
/// I level and (b2 b3) the Q level.
pub fn qam16_map(bits: &BitBlock) -> Result<QamSymbolVector, PhyError> {
    if bits.len() % 4 != 0 {
        return Err(PhyError::NotSymbolAligned(bits.len()));
    }
    let a = scale();
    let symbols = bits
        .as_slice()
        .chunks(4)
        .map(|b| Complex64::new(gray_level(b[0], b[1]) * a, gray_level(b[2], b[3]) * a))
        .collect();
    Ok(QamSymbolVector { symbols })
}

/// Exact per-bit log-likelihood ratios under complex Gaussian noise with
/// per-real-dimension variance `n0 / 2`.
///
/// Four LLRs per symbol, positive meaning bit 0 is more likely. The Gray
/// labeling is I/Q separable, so each bit's likelihood sum over the eight
/// constellation points collapses to a sum over the four levels of one
/// axis; the other axis factor cancels in the ratio.
pub fn qam16_demap_llr(symbols: &[Complex64], n0: f64) -> Result<Vec<f64>, PhyError> {
    if n0 <= 0.0 {
        return Err(PhyError::NonPositiveNoise(n0));
    }
    let a = scale();
    let mut llrs = Vec::with_capacity(symbols.len() * 4);
    for symbol in symbols {
        for (bit_pos, y) in [(0usize, symbol.re), (2usize, symbol.im)] {
            // Log-domain metrics for the four levels of this axis.
            let metrics: [f64; 4] = std::array::from_fn(|i| {
                let d = y - LEVELS[i] * a;
                -d * d / n0
            });
            for bit_in_pair in 0..2 {
                let mut zero = f64::NEG_INFINITY;
                let mut one = f64::NEG_INFINITY;
                for (i, m) in metrics.iter().enumerate() {
                    let bit = if bit_in_pair == 0 {
                        LEVEL_BITS[i].0
                    } else {
                        LEVEL_BITS[i].1
                    };
                    if bit == 0 {
                        zero = log_add(zero, *m);
                    } else {
                        one = log_add(one, *m);
                    }
                }
                let _ = bit_pos;
                llrs.push(zero - one);
            }
        }
    }
    Ok(llrs)
}

/// Numerically stable log(exp(a) + exp(b)).
fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha20Rng;

    fn all_labels() -> Vec<(u8, u8, u8, u8)> {
        let mut labels = Vec::new();
        for b0 in 0..2u8 {
            for b1 in 0..2u8 {
                for b2 in 0..2u8 {
                    for b3 in 0..2u8 {
                        labels.push((b0, b1, b2, b3));
                    }
                }
            }
        }
        labels
    }

    fn map_label(label: (u8, u8, u8, u8)) -> Complex64 {
        let bits = BitBlock::new(vec![label.0, label.1, label.2, label.3]).unwrap();
        qam16_map(&bits).unwrap().symbols[0]
    }

    /// Brute-force Bayes demapper over all 16 points, the independent
    /// reference for the factorized implementation.
    fn demap_oracle(y: Complex64, n0: f64) -> [f64; 4] {
        let mut sums = [[0.0f64; 2]; 4];
        for label in all_labels() {
            let s = map_label(label);
            let likelihood = (-(y - s).norm_sqr() / n0).exp();
            let bits = [label.0, label.1, label.2, label.3];
            for (pos, bit) in bits.iter().enumerate() {
                sums[pos][*bit as usize] += likelihood;
            }
        }
        std::array::from_fn(|pos| sums[pos][0].ln() - sums[pos][1].ln())
    }

    #[test]
    fn all_zero_bits_map_to_lower_left_corner() {
        let s = map_label((0, 0, 0, 0));
        let expected = Complex64::new(-3.0, -3.0) / 10f64.sqrt();
        assert!((s - expected).norm() < 1e-15);
    }

    #[test]
    fn average_constellation_energy_is_one() {
        let total: f64 = all_labels().iter().map(|l| map_label(*l).norm_sqr()).sum();
        assert!((total / 16.0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn adjacent_neighbours_differ_in_exactly_one_bit() {
        let labels = all_labels();
        let spacing = 2.0 / 10f64.sqrt();
        let mut neighbour_pairs = 0;
        for (i, la) in labels.iter().enumerate() {
            for lb in labels.iter().skip(i + 1) {
                let (sa, sb) = (map_label(*la), map_label(*lb));
                if ((sa - sb).norm() - spacing).abs() < 1e-12 {
                    let diff = [la.0 ^ lb.0, la.1 ^ lb.1, la.2 ^ lb.2, la.3 ^ lb.3];
                    let flips: u8 = diff.iter().sum();
                    assert_eq!(flips, 1, "labels {la:?} and {lb:?} are neighbours");
                    neighbour_pairs += 1;
                }
            }
        }
        assert_eq!(neighbour_pairs, 24);
    }

    #[test]
    fn hard_decisions_recover_labels_in_the_noiseless_limit() {
        for label in all_labels() {
            let llrs = qam16_demap_llr(&[map_label(label)], 1e-3).unwrap();
            let decided: Vec<u8> = llrs.iter().map(|l| u8::from(*l < 0.0)).collect();
            assert_eq!(decided, vec![label.0, label.1, label.2, label.3]);
        }
    }

    #[test]
    fn matches_bayes_oracle_on_random_points() {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        for _ in 0..1000 {
            let y = Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            let n0 = rng.gen_range(0.05..1.0);
            let llrs = qam16_demap_llr(&[y], n0).unwrap();
            let oracle = demap_oracle(y, n0);
            for (got, want) in llrs.iter().zip(oracle.iter()) {
                assert!((got - want).abs() < 1e-9, "got {got}, oracle {want}");
            }
        }
    }

    #[test]
    fn negating_the_i_axis_negates_the_sign_bit_llr() {
        let mut rng = ChaCha20Rng::seed_from_u64(22);
        for _ in 0..200 {
            let y = Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            let n0 = rng.gen_range(0.05..1.0);
            let llrs = qam16_demap_llr(&[y], n0).unwrap();
            let mirrored = qam16_demap_llr(&[Complex64::new(-y.re, y.im)], n0).unwrap();
            assert!((llrs[0] + mirrored[0]).abs() < 1e-9);
            assert!((llrs[1] - mirrored[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn unaligned_length_is_rejected() {
        let bits = BitBlock::new(vec![0, 1, 0]).unwrap();
        assert!(matches!(
            qam16_map(&bits),
            Err(PhyError::NotSymbolAligned(3))
        ));
    }

    #[test]
    fn non_positive_noise_is_rejected() {
        assert!(qam16_demap_llr(&[], 0.0).is_err());
        assert!(qam16_demap_llr(&[], -1.0).is_err());
    }
}
