//! Counter-based seed derivation for reproducible sweep cells.

use sha2::{Digest, Sha256};

use crate::config::SchemeId;

/// Seed for one (scheme, SNR, repetition) cell: SHA-256 over the string
/// `"{master}|{scheme}|{snr_db:.3}|{rep}"`, first 8 bytes big-endian.
/// The fixed 3-decimal SNR formatting keeps the seed independent of how
/// the SNR value was produced.
pub fn derive_seed(master: u64, scheme: SchemeId, snr_db: f64, rep: usize) -> u64 {
    let text = format!("{master}|{scheme}|{snr_db:.3}|{rep}");
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    u64::from_be_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}

/// Salts a cell seed with a per-frame counter so frame-level randomness is
/// independent of processing order.
pub(crate) fn mix_seed(seed: u64, salt: u64) -> u64 {
    seed ^ (salt.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}
