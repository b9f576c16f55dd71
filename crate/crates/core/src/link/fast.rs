use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{sinr_values, StreamPlan, TrialOutcome};
use crate::channel::ChannelPair;
use crate::error::{Error, Result};
use crate::precoder::precoder_set;
use crate::waveform::FrameConfig;

pub const TABLE_VERSION: u32 = 1;

/// Standard-normal quantile at 0.9; a 10%-90% span covers `2·Z90` sigmas.
const Z90: f64 = 1.281_551_565_544_600_4;

/// Measured block successes at one SNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub snr_db: f64,
    pub successes: usize,
    pub trials: usize,
}

impl CurvePoint {
    pub fn probability(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEntry {
    pub mcs: u8,
    /// SNR at 50% block success, dB.
    pub threshold_db: f64,
    /// 10%-90% transition span, dB.
    pub width_db: f64,
    /// Coarse 1 dB search grid.
    pub grid: Vec<CurvePoint>,
    /// Fine grid around the threshold.
    pub curve: Vec<CurvePoint>,
}

impl ThresholdEntry {
    /// Gaussian jitter sigma (dB) reproducing the measured width.
    pub fn jitter_sigma_db(&self) -> f64 {
        self.width_db / (2.0 * Z90)
    }

    /// Success probability implied by the Gaussian transition model.
    pub fn model_probability(&self, snr_db: f64) -> f64 {
        let sigma = self.jitter_sigma_db();
        if sigma == 0.0 {
            return f64::from(u8::from(snr_db >= self.threshold_db));
        }
        normal_cdf((snr_db - self.threshold_db) / sigma)
    }
}

fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Per-MCS SINR thresholds for one frame layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdTable {
    pub version: u32,
    pub frame: FrameConfig,
    pub runs_per_point: usize,
    pub seed: u64,
    pub entries: Vec<ThresholdEntry>,
}

impl ThresholdTable {
    pub fn entry(&self, mcs: u8) -> Result<&ThresholdEntry> {
        self.entries
            .iter()
            .find(|e| e.mcs == mcs)
            .ok_or_else(|| Error::Calibration(format!("no threshold for MCS {mcs}")))
    }

    pub fn threshold_db(&self, mcs: u8) -> Result<f64> {
        Ok(self.entry(mcs)?.threshold_db)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Calibration(e.to_string()))
    }

    /// Parses a stored table and checks its version.
    pub fn from_json(text: &str) -> Result<Self> {
        let table: Self =
            serde_json::from_str(text).map_err(|e| Error::Calibration(format!("bad threshold table: {e}")))?;
        if table.version != TABLE_VERSION {
            return Err(Error::Calibration(format!(
                "threshold table version {} (expected {TABLE_VERSION})",
                table.version
            )));
        }
        Ok(table)
    }
}

/// Threshold-mode trial. Each stream succeeds when its SINR plus a Gaussian
/// jitter (in dB) reaches the MCS threshold; a private stream additionally
/// needs the same user's common stream whenever one is transmitted.
pub fn run_trial_fast(
    pair: &ChannelPair,
    plan: &StreamPlan,
    noise_var: f64,
    thresholds: &ThresholdTable,
    seed: u64,
) -> Result<TrialOutcome> {
    let pre = precoder_set(pair, plan.split)?;
    let sinr = sinr_values(pair, &pre, noise_var);
    let (common_db, private_db) = (sinr.common_db(), sinr.private_db());
    let common = thresholds.entry(plan.mcs_c.index)?;
    let private = [thresholds.entry(plan.mcs_1.index)?, thresholds.entry(plan.mcs_2.index)?];

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let passes = |snr_db: f64, e: &ThresholdEntry, z: f64| snr_db + e.jitter_sigma_db() * z >= e.threshold_db;

    let has_common = plan.split.has_common();
    let has_private = plan.split.has_private();
    let common_ok = [0, 1].map(|i| has_common && passes(common_db[i], common, z[i]));
    let private_ok = [0, 1].map(|i| {
        has_private && (!has_common || common_ok[i]) && passes(private_db[i], private[i], z[2 + i])
    });
    Ok(TrialOutcome {
        common_ok_u1: common_ok[0],
        common_ok_u2: common_ok[1],
        private_ok_u1: private_ok[0],
        private_ok_u2: private_ok[1],
        sinr_common: common_db,
        sinr_private: private_db,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precoder::PowerSplit;
    use num_complex::Complex64;

    fn toy_table() -> ThresholdTable {
        ThresholdTable {
            version: TABLE_VERSION,
            frame: FrameConfig::default(),
            runs_per_point: 100,
            seed: 0,
            entries: (0..10)
                .map(|m| ThresholdEntry {
                    mcs: m,
                    threshold_db: f64::from(m) * 2.0 - 20.0,
                    width_db: 0.5,
                    grid: vec![],
                    curve: vec![],
                })
                .collect(),
        }
    }

    fn orthonormal() -> ChannelPair {
        ChannelPair::perfect(
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        )
    }

    #[test]
    fn high_snr_passes_everything() {
        let plan = StreamPlan::new([9, 9, 9], PowerSplit::new(0.5, 1.0).unwrap()).unwrap();
        let out = run_trial_fast(&orthonormal(), &plan, 1e-6, &toy_table(), 4).unwrap();
        assert!(out.common_ok_u1 && out.common_ok_u2 && out.private_ok_u1 && out.private_ok_u2);
    }

    #[test]
    fn private_needs_common() {
        // Common SINR near -17 dB is far below the -14 dB threshold of MCS 3.
        let plan = StreamPlan::new([3, 0, 0], PowerSplit::new(0.99, 1.0).unwrap()).unwrap();
        for seed in 0..200 {
            let out = run_trial_fast(&orthonormal(), &plan, 1e-4, &toy_table(), seed).unwrap();
            assert!(!out.common_ok_u1 && !out.private_ok_u1 && !out.private_ok_u2);
        }
    }

    #[test]
    fn missing_entry_is_calibration_error() {
        let mut table = toy_table();
        table.entries.truncate(3);
        let plan = StreamPlan::new([5, 0, 0], PowerSplit::new(0.5, 1.0).unwrap()).unwrap();
        let err = run_trial_fast(&orthonormal(), &plan, 0.1, &table, 0).unwrap_err();
        assert!(matches!(err, Error::Calibration(_)));
    }

    #[test]
    fn normal_cdf_reference_values() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-12);
        assert!((normal_cdf(Z90) - 0.9).abs() < 1e-12);
        assert!((normal_cdf(-1.959_963_985) - 0.025).abs() < 1e-9);
    }
}
