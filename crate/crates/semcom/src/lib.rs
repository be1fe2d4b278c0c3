//! Link-level simulation framework for retrieval-oriented semantic
//! communication.
//!
//! The crate compares five ways of moving the same surveillance-style
//! retrieval task across an AWGN channel:
//!
//! * `traditional` — a classical digital chain: framing with CRC-32,
//!   rate-1/2 LDPC coding with belief-propagation decoding, Gray-coded
//!   16-QAM with exact soft demapping.
//! * `vae`, `gan`, `dm` — analog joint source-channel coding over
//!   desk-scale generative codecs (variational autoencoder, least-squares
//!   generator inversion, denoising diffusion with channel denoising).
//! * `generative` — an agent pair: the transmitter condenses each frame
//!   into a short attribute entry, the receiver repairs and expands it
//!   back into a sentence and retrieves with a sentence-embedding head.
//!
//! Everything is deterministic given a master seed; experiment sweeps
//! emit CSV records that are reproducible byte for byte.

pub mod agents;
pub mod channel;
pub mod codecs;
pub mod config;
pub mod corpus;
pub mod phy;
pub mod pipeline;
pub mod transformer;
