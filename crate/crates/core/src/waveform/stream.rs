use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use super::crc::CRC11_LEN;
use super::ofdm::FrameConfig;
use super::polar::{shared_code_with, PolarCode, PolarDecoded, LIST_SIZE};
use super::qam::{qam_demodulate_llr_with, qam_modulate, LlrMode};
use super::McsLevel;
use crate::error::{Error, Result};

/// Payload and codeword of one stream's frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedBlock {
    pub info_bits: Vec<u8>,
    pub coded_bits: Vec<u8>,
    pub crc_len: usize,
}

/// Coded length `n = n_data · m · payload_symbols` for a stream.
pub fn coded_len(mcs: &McsLevel, frame: &FrameConfig) -> usize {
    frame.data_symbols() * usize::from(mcs.m)
}

/// Payload size `k = n·r − crc_len`.
pub fn payload_len(mcs: &McsLevel, frame: &FrameConfig) -> Result<usize> {
    let n = coded_len(mcs, frame);
    let num = n * usize::from(mcs.rate_num);
    let den = usize::from(mcs.rate_den);
    if !num.is_multiple_of(den) {
        return Err(Error::param(
            "phy.payload_symbols",
            format!("{n} coded bits at rate {}/{den} is not an integer", mcs.rate_num),
        ));
    }
    let carried = num / den;
    if carried <= CRC11_LEN {
        return Err(Error::param("phy.payload_symbols", "frame too short for the CRC"));
    }
    Ok(carried - CRC11_LEN)
}

/// Polar + QAM pipeline for one stream at a fixed MCS and frame layout.
#[derive(Debug, Clone)]
pub struct StreamCodec {
    mcs: McsLevel,
    code: Arc<PolarCode>,
    llr_mode: LlrMode,
}

impl StreamCodec {
    pub fn new(mcs: McsLevel, frame: &FrameConfig) -> Result<Self> {
        frame.validate()?;
        let n = coded_len(&mcs, frame);
        let k = payload_len(&mcs, frame)?;
        Ok(Self {
            mcs,
            code: shared_code_with(n, k, mcs.design_snr_db())?,
            llr_mode: LlrMode::MaxLog,
        })
    }

    pub fn with_llr_mode(mut self, mode: LlrMode) -> Self {
        self.llr_mode = mode;
        self
    }

    pub fn mcs(&self) -> McsLevel {
        self.mcs
    }

    pub fn payload_len(&self) -> usize {
        self.code.k()
    }

    pub fn coded_len(&self) -> usize {
        self.code.n()
    }

    pub fn random_payload<R: Rng>(&self, rng: &mut R) -> Vec<u8> {
        (0..self.payload_len()).map(|_| rng.gen_range(0..=1u8)).collect()
    }

    pub fn encode(&self, info_bits: &[u8]) -> Result<CodedBlock> {
        Ok(CodedBlock {
            info_bits: info_bits.to_vec(),
            coded_bits: self.code.encode(info_bits)?,
            crc_len: CRC11_LEN,
        })
    }

    /// Data-subcarrier symbols carrying `info_bits`.
    pub fn modulate(&self, info_bits: &[u8]) -> Result<Vec<Complex64>> {
        let block = self.encode(info_bits)?;
        qam_modulate(&block.coded_bits, self.mcs.m)
    }

    /// Decodes equalized symbols observed with per-symbol noise variance
    /// `noise_var`.
    pub fn decode(&self, symbols: &[Complex64], noise_var: f64) -> Result<PolarDecoded> {
        let llrs = qam_demodulate_llr_with(symbols, self.mcs.m, noise_var, self.llr_mode)?;
        self.code.decode(&llrs, LIST_SIZE)
    }
}
