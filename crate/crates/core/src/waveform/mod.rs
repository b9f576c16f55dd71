//! Per-stream bit pipeline: MCS table, polar coding, QAM mapping and OFDM
//! framing.

pub mod crc;
pub mod mcs;
pub mod ofdm;
pub mod polar;
pub mod qam;
pub mod stream;

pub use mcs::{mcs_params, McsLevel, BANDWIDTH_MHZ, MCS_COUNT};
pub use ofdm::{ofdm_assemble, ofdm_extract, FrameConfig, DEFAULT_PILOTS};
pub use polar::{polar_decode, polar_encode, PolarCode, PolarDecoded};
pub use qam::{qam_demodulate_llr, qam_demodulate_llr_with, qam_modulate, LlrMode};
pub use stream::{CodedBlock, StreamCodec};
