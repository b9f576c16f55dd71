use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bandwidth excluding overheads, in MHz.
pub const BANDWIDTH_MHZ: f64 = 12.0;

pub const MCS_COUNT: usize = 10;

/// One row of the MCS table: `m` bits per symbol and code rate `num/den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct McsLevel {
    pub index: u8,
    pub m: u8,
    pub rate_num: u8,
    pub rate_den: u8,
}

const TABLE: [(u8, u8, u8); MCS_COUNT] = [
    (1, 1, 2),
    (1, 3, 4),
    (2, 1, 2),
    (2, 3, 4),
    (4, 1, 2),
    (4, 3, 4),
    (6, 2, 3),
    (6, 3, 4),
    (8, 3, 4),
    (8, 5, 6),
];

const DESIGN_SNR_DB: [f64; MCS_COUNT] = [-2.0, 0.5, -1.5, 1.5, -1.0, 1.0, 0.0, 1.0, 2.0, 3.0];

impl McsLevel {
    pub fn code_rate(&self) -> f64 {
        f64::from(self.rate_num) / f64::from(self.rate_den)
    }

    /// Spectral efficiency `m·r` in bits/s/Hz.
    pub fn spectral_efficiency(&self) -> f64 {
        f64::from(self.m) * f64::from(self.rate_num) / f64::from(self.rate_den)
    }

    /// Peak data rate `B·m·r` in Mbps.
    pub fn max_data_rate_mbps(&self) -> f64 {
        BANDWIDTH_MHZ * f64::from(self.m) * f64::from(self.rate_num) / f64::from(self.rate_den)
    }

    /// Design SNR (dB, BPSK-equivalent) of the polar construction, tuned per
    /// MCS for the default frame by minimizing the block error rate near the
    /// operating point.
    pub fn design_snr_db(&self) -> f64 {
        DESIGN_SNR_DB[usize::from(self.index)]
    }

    pub fn label(&self) -> &'static str {
        match self.m {
            1 => "BPSK",
            2 => "QPSK",
            4 => "16QAM",
            6 => "64QAM",
            _ => "256QAM",
        }
    }

    pub fn all() -> impl Iterator<Item = McsLevel> {
        (0..MCS_COUNT as u8).map(|i| mcs_params(i).expect("index in table"))
    }
}

impl fmt::Display for McsLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "MCS {} ({} {}/{})",
            self.index,
            self.label(),
            self.rate_num,
            self.rate_den
        )
    }
}

/// Looks up an MCS index (0-9).
pub fn mcs_params(index: u8) -> Result<McsLevel> {
    let &(m, rate_num, rate_den) = TABLE
        .get(usize::from(index))
        .ok_or(Error::InvalidMcs(index))?;
    Ok(McsLevel {
        index,
        m,
        rate_num,
        rate_den,
    })
}
