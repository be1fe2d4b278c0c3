//! Closed-form communication-overhead accounting.
//!
//! Overhead charges the channel bits that carry source payload: digital
//! chains pay the rate-1/2 expansion on their payload bytes, analog
//! chains pay 32 bits per latent component plus 32 bits of gain side
//! information per frame. Link framing (header/CRC) and LDPC block
//! padding are fixed per-link costs and are not charged, which keeps the
//! accounting exactly recomputable from the payload sizes alone.

/// Channel bits for one digital transmission of `payload_bytes` source
/// bytes through the rate-1/2 coded chain.
pub fn digital_payload_overhead_bits(payload_bytes: usize) -> u64 {
    payload_bytes as u64 * 8 * 2
}

/// Channel bits charged to one analog latent transmission.
pub fn analog_frame_overhead_bits(latent_dim: usize) -> u64 {
    latent_dim as u64 * 32 + 32
}
