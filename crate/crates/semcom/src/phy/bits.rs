//! Binary payloads flowing through the coded chain.

use super::PhyError;

/// A sequence of bits stored one per byte, each strictly 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitBlock {
    bits: Vec<u8>,
}

impl BitBlock {
    pub fn new(bits: Vec<u8>) -> Result<Self, PhyError> {
        if bits.iter().any(|b| *b > 1) {
            return Err(PhyError::NonBinary);
        }
        Ok(Self { bits })
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            bits: vec![0; len],
        }
    }

    /// Unpacks bytes MSB-first into bits.
    pub fn from_bytes_msb(bytes: &[u8]) -> Self {
        let mut bits = Vec::with_capacity(bytes.len() * 8);
        for byte in bytes {
            for shift in (0..8).rev() {
                bits.push((byte >> shift) & 1);
            }
        }
        Self { bits }
    }

    /// Packs bits MSB-first into bytes; the length must be a multiple of 8.
    pub fn to_bytes_msb(&self) -> Vec<u8> {
        debug_assert_eq!(self.bits.len() % 8, 0);
        self.bits
            .chunks(8)
            .map(|chunk| chunk.iter().fold(0u8, |acc, b| (acc << 1) | b))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    pub fn push(&mut self, bit: u8) {
        debug_assert!(bit <= 1);
        self.bits.push(bit);
    }

    pub fn extend_from(&mut self, other: &BitBlock) {
        self.bits.extend_from_slice(&other.bits);
    }

    /// Appends `value`'s low `width` bits, most significant first.
    pub fn push_uint(&mut self, value: u64, width: usize) {
        for shift in (0..width).rev() {
            self.bits.push(((value >> shift) & 1) as u8);
        }
    }

    /// Reads `width` bits starting at `offset` as a big-endian integer.
    pub fn read_uint(&self, offset: usize, width: usize) -> u64 {
        self.bits[offset..offset + width]
            .iter()
            .fold(0u64, |acc, b| (acc << 1) | u64::from(*b))
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> BitBlock {
        BitBlock {
            bits: self.bits[range].to_vec(),
        }
    }

    /// Pads with zeros so the length becomes a multiple of `align`.
    pub fn pad_to_multiple(&mut self, align: usize) {
        if align > 1 {
            let rem = self.bits.len() % align;
            if rem != 0 {
                self.bits.resize(self.bits.len() + align - rem, 0);
            }
        }
    }

    pub fn xor(&self, other: &BitBlock) -> Result<BitBlock, PhyError> {
        if self.len() != other.len() {
            return Err(PhyError::LengthMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(BitBlock {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| a ^ b)
                .collect(),
        })
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|b| **b == 1).count()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, u8> {
        self.bits.iter()
    }
}

impl From<&[u8]> for BitBlock {
    fn from(bits: &[u8]) -> Self {
        Self::new(bits.to_vec()).expect("binary input")
    }
}

impl std::ops::Index<usize> for BitBlock {
    type Output = u8;

    fn index(&self, i: usize) -> &u8 {
        &self.bits[i]
    }
}
