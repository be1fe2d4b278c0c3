//! Link-layer framing: a 48-bit header, the payload, and a CRC-32
//! trailer. A failed CRC is how the digital chain loses a frame.

use super::bits::BitBlock;
use super::crc::crc32;
use super::PhyError;

/// Header (32-bit frame id + 16-bit payload length) plus CRC-32 trailer.
pub const FRAME_OVERHEAD_BITS: usize = 80;

/// A decoded frame whose checksum verified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub frame_id: u32,
    pub payload: Vec<u8>,
}

fn header_payload_bytes(frame_id: u32, payload: &[u8]) -> Vec<u8> {
    let mut bytes = Vec::with_capacity(6 + payload.len());
    bytes.extend_from_slice(&frame_id.to_be_bytes());
    bytes.extend_from_slice(&(payload.len() as u16).to_be_bytes());
    bytes.extend_from_slice(payload);
    bytes
}

/// Packs a frame into bits, big-endian fields, zero-padded to a multiple
/// of `pad_to` so the stream segments evenly into LDPC message blocks.
pub fn frame_pack(frame_id: u32, payload: &[u8], pad_to: usize) -> Result<BitBlock, PhyError> {
    if payload.len() > u16::MAX as usize {
        return Err(PhyError::PayloadTooLong(payload.len()));
    }
    let body = header_payload_bytes(frame_id, payload);
    let checksum = crc32(&body);
    let mut bits = BitBlock::from_bytes_msb(&body);
    bits.push_uint(u64::from(checksum), 32);
    bits.pad_to_multiple(pad_to);
    Ok(bits)
}

/// Extracted frame fields before integrity verification.
#[derive(Debug, Clone)]
pub struct LossyFrame {
    pub frame_id: u32,
    pub payload: Vec<u8>,
    pub crc_ok: bool,
}

/// Best-effort unpacking: reads the header, clamps the claimed payload
/// length to the bits actually present, and reports whether the checksum
/// verified. Callers that want the drop rule use [`frame_unpack`].
pub fn frame_unpack_lossy(bits: &BitBlock) -> Result<LossyFrame, PhyError> {
    if bits.len() < FRAME_OVERHEAD_BITS {
        return Err(PhyError::Truncated(bits.len()));
    }
    let frame_id = bits.read_uint(0, 32) as u32;
    let claimed_len = bits.read_uint(32, 16) as usize;
    let available = (bits.len() - FRAME_OVERHEAD_BITS) / 8;
    let payload_len = claimed_len.min(available);

    let payload_bits = bits.slice(48..48 + payload_len * 8);
    let payload = payload_bits.to_bytes_msb();
    let stored_crc = bits.read_uint(48 + payload_len * 8, 32) as u32;

    let body = header_payload_bytes(frame_id, &payload);
    let crc_ok = claimed_len == payload_len && crc32(&body) == stored_crc;

    Ok(LossyFrame {
        frame_id,
        payload,
        crc_ok,
    })
}

/// Unpacks and verifies a frame. `None` means the checksum failed, which
/// the digital chain counts as a lost frame; structural problems (too few
/// bits to hold a header and trailer) are errors.
pub fn frame_unpack(bits: &BitBlock) -> Result<Option<Frame>, PhyError> {
    let lossy = frame_unpack_lossy(bits)?;
    if !lossy.crc_ok {
        return Ok(None);
    }
    Ok(Some(Frame {
        frame_id: lossy.frame_id,
        payload: lossy.payload,
    }))
}
