//! Digital physical layer: bit blocks, CRC-32 framing, rate-1/2 LDPC
//! coding with belief-propagation decoding, and Gray-coded 16-QAM with
//! exact soft demapping.

mod bits;
mod crc;
mod frame;
mod ldpc;
mod qam;

pub use bits::BitBlock;
pub use crc::crc32;
pub use frame::{frame_pack, frame_unpack, frame_unpack_lossy, Frame, FRAME_OVERHEAD_BITS};
pub use ldpc::{ldpc_build, ldpc_decode, ldpc_encode, DecodeResult, LdpcCode};
pub use qam::{qam16_demap_llr, qam16_map, QamSymbolVector};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PhyError {
    #[error("bit values must be 0 or 1")]
    NonBinary,
    #[error("bit block length {found} does not match expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("bit block length {0} is not divisible by 4")]
    NotSymbolAligned(usize),
    #[error("noise spectral density must be positive, got {0}")]
    NonPositiveNoise(f64),
    #[error("llr values must be finite")]
    NonFiniteLlr,
    #[error("parity-check matrix is rank deficient after {attempts} construction attempts")]
    RankDeficient { attempts: usize },
    #[error("frame payload of {0} bytes exceeds the 16-bit length field")]
    PayloadTooLong(usize),
    #[error("bit stream of {0} bits is too short to hold a frame")]
    Truncated(usize),
}
