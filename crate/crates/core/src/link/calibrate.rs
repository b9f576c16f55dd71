use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fast::{run_trial_fast, CurvePoint, ThresholdEntry, ThresholdTable, TABLE_VERSION};
use super::{run_trial_with, scalar_link, LinkOptions, StreamPlan};
use crate::error::{Error, Result};
use crate::precoder::PowerSplit;
use crate::seed::derive_seed;
use crate::waveform::{mcs_params, ofdm_assemble, ofdm_extract, FrameConfig, LlrMode, McsLevel, StreamCodec, DEFAULT_PILOTS, MCS_COUNT};

/// Seed used by `calibrate_thresholds`.
pub const CALIBRATION_SEED: u64 = 0x5EED_CA11;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationOptions {
    /// Trials per point of the fine grid.
    pub runs_per_point: usize,
    /// Trials per point of the coarse 1 dB search.
    pub coarse_runs: usize,
    pub fine_step_db: f64,
    /// Initial half-span of the fine grid around the coarse crossing.
    pub fine_half_span_db: f64,
    pub seed: u64,
    pub llr_mode: LlrMode,
}

impl CalibrationOptions {
    pub fn new(runs_per_point: usize) -> Self {
        Self {
            runs_per_point,
            coarse_runs: 40,
            fine_step_db: 0.1,
            fine_half_span_db: 0.5,
            seed: CALIBRATION_SEED,
            llr_mode: LlrMode::MaxLog,
        }
    }
}

const MAX_EXTENSIONS: usize = 40;

fn snr_key(snr_db: f64) -> u64 {
    (snr_db * 1000.0).round() as i64 as u64
}

/// One frame over a unit-gain AWGN link at `snr_db`.
fn awgn_block_success(codec: &StreamCodec, frame: &FrameConfig, snr_db: f64, seed: u64) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let payload = codec.random_payload(&mut rng);
    let samples = ofdm_assemble(&codec.modulate(&payload)?, frame, &DEFAULT_PILOTS)?;
    let var = 10f64.powf(-snr_db / 10.0);
    let s = (var / 2.0).sqrt();
    let noisy: Vec<Complex64> = samples
        .iter()
        .map(|v| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            v + Complex64::new(re * s, im * s)
        })
        .collect();
    let decoded = codec.decode(&ofdm_extract(&noisy, frame)?, var)?;
    Ok(decoded.success && decoded.bits == payload)
}

fn measure(codec: &StreamCodec, frame: &FrameConfig, snr_db: f64, trials: usize, seed: u64) -> Result<CurvePoint> {
    let snr_db = (snr_db * 1000.0).round() / 1000.0;
    let base = derive_seed(seed, &[u64::from(codec.mcs().index), snr_key(snr_db)]);
    let flags = (0..trials)
        .into_par_iter()
        .map(|r| awgn_block_success(codec, frame, snr_db, derive_seed(base, &[r as u64])))
        .collect::<Result<Vec<bool>>>()?;
    Ok(CurvePoint {
        snr_db,
        successes: flags.iter().filter(|&&f| f).count(),
        trials,
    })
}

/// Weighted pool-adjacent-violators fit (non-decreasing).
fn isotonic(points: &[CurvePoint]) -> Vec<f64> {
    let mut blocks: Vec<(f64, f64, usize)> = Vec::new();
    for p in points {
        blocks.push((p.successes as f64, p.trials as f64, 1));
        while blocks.len() > 1 {
            let (s1, w1, n1) = blocks[blocks.len() - 1];
            let (s0, w0, n0) = blocks[blocks.len() - 2];
            if s0 / w0 <= s1 / w1 {
                break;
            }
            blocks.pop();
            *blocks.last_mut().expect("two blocks") = (s0 + s1, w0 + w1, n0 + n1);
        }
    }
    blocks
        .into_iter()
        .flat_map(|(s, w, n)| std::iter::repeat_n(s / w, n))
        .collect()
}

/// SNR where the fitted curve first reaches `level`, linearly interpolated.
fn crossing(points: &[CurvePoint], fit: &[f64], level: f64) -> Option<f64> {
    let i = fit.iter().position(|&q| q >= level)?;
    if i == 0 {
        return Some(points[0].snr_db);
    }
    let (x0, x1) = (points[i - 1].snr_db, points[i].snr_db);
    let (q0, q1) = (fit[i - 1], fit[i]);
    Some(x0 + (level - q0) / (q1 - q0) * (x1 - x0))
}

fn check_monotone(mcs: &McsLevel, points: &[CurvePoint]) -> Result<()> {
    for w in points.windows(2) {
        let (p0, p1) = (w[0].probability(), w[1].probability());
        let pbar = (p0 + p1) / 2.0;
        let n = w[0].trials.min(w[1].trials) as f64;
        let tol = 4.0 * (2.0 * pbar * (1.0 - pbar) / n).sqrt() + 0.02;
        if p0 - p1 > tol {
            return Err(Error::Calibration(format!(
                "non-monotone success curve for MCS {}: {p0:.3} at {} dB, {p1:.3} at {} dB",
                mcs.index, w[0].snr_db, w[1].snr_db
            )));
        }
    }
    Ok(())
}

/// First guess for the threshold: the Shannon SNR of the MCS plus 1 dB.
fn initial_guess(mcs: &McsLevel) -> f64 {
    (10.0 * (2f64.powf(mcs.spectral_efficiency()) - 1.0).log10() + 1.0).round()
}

/// Threshold and transition width of one MCS on an AWGN link.
pub fn calibrate_mcs(mcs: McsLevel, frame: &FrameConfig, opts: &CalibrationOptions) -> Result<ThresholdEntry> {
    if opts.runs_per_point < 100 {
        return Err(Error::param("runs_per_point", "at least 100 runs per point are required"));
    }
    let codec = StreamCodec::new(mcs, frame)?.with_llr_mode(opts.llr_mode);
    let g0 = initial_guess(&mcs);
    let mut grid = (-3..=3)
        .map(|d| measure(&codec, frame, g0 + f64::from(d), opts.coarse_runs, opts.seed))
        .collect::<Result<Vec<_>>>()?;
    for _ in 0..MAX_EXTENSIONS {
        if grid[0].probability() < 0.5 {
            break;
        }
        grid.insert(0, measure(&codec, frame, grid[0].snr_db - 1.0, opts.coarse_runs, opts.seed)?);
    }
    for _ in 0..MAX_EXTENSIONS {
        if grid.last().expect("non-empty").probability() >= 0.5 {
            break;
        }
        let next = grid.last().expect("non-empty").snr_db + 1.0;
        grid.push(measure(&codec, frame, next, opts.coarse_runs, opts.seed)?);
    }
    check_monotone(&mcs, &grid)?;
    let coarse = crossing(&grid, &isotonic(&grid), 0.5)
        .ok_or_else(|| Error::Calibration(format!("MCS {} never reaches 50% success", mcs.index)))?;

    let step = opts.fine_step_db;
    let center = (coarse / step).round() * step;
    let half = (opts.fine_half_span_db / step).round() as i32;
    let mut curve = (-half..=half)
        .map(|k| measure(&codec, frame, center + f64::from(k) * step, opts.runs_per_point, opts.seed))
        .collect::<Result<Vec<_>>>()?;
    for _ in 0..MAX_EXTENSIONS {
        if curve[0].probability() <= 0.1 {
            break;
        }
        curve.insert(0, measure(&codec, frame, curve[0].snr_db - step, opts.runs_per_point, opts.seed)?);
    }
    for _ in 0..MAX_EXTENSIONS {
        let last = curve.last().expect("non-empty");
        if last.probability() >= 0.9 {
            break;
        }
        let next = last.snr_db + step;
        curve.push(measure(&codec, frame, next, opts.runs_per_point, opts.seed)?);
    }
    check_monotone(&mcs, &curve)?;
    let fit = isotonic(&curve);
    let at = |level: f64| {
        crossing(&curve, &fit, level)
            .ok_or_else(|| Error::Calibration(format!("MCS {} curve does not reach {level}", mcs.index)))
    };
    let (x10, x50, x90) = (at(0.1)?, at(0.5)?, at(0.9)?);
    Ok(ThresholdEntry {
        mcs: mcs.index,
        threshold_db: x50,
        width_db: x90 - x10,
        grid,
        curve,
    })
}

/// Calibrates every MCS with the fixed seed policy.
pub fn calibrate_thresholds(frame: &FrameConfig, runs_per_point: usize) -> Result<ThresholdTable> {
    calibrate_thresholds_with(frame, &CalibrationOptions::new(runs_per_point))
}

pub fn calibrate_thresholds_with(frame: &FrameConfig, opts: &CalibrationOptions) -> Result<ThresholdTable> {
    frame.validate()?;
    let entries = (0..MCS_COUNT as u8)
        .map(|i| calibrate_mcs(mcs_params(i)?, frame, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(ThresholdTable {
        version: TABLE_VERSION,
        frame: *frame,
        runs_per_point: opts.runs_per_point,
        seed: opts.seed,
        entries,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointAgreement {
    pub mcs: u8,
    pub snr_db: f64,
    pub trials: usize,
    pub p_full: f64,
    pub p_fast: f64,
}

/// Flag-level comparison of the two link modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub comparisons: usize,
    pub agreements: usize,
    pub points: Vec<PointAgreement>,
}

impl AgreementReport {
    pub fn agreement(&self) -> f64 {
        self.agreements as f64 / self.comparisons as f64
    }

    pub fn max_probability_gap(&self) -> f64 {
        self.points.iter().map(|p| (p.p_full - p.p_fast).abs()).fold(0.0, f64::max)
    }
}

/// Runs paired full and fast trials on each MCS's coarse calibration grid
/// and compares the common-stream flags of both users.
pub fn validate_fast_mode(
    table: &ThresholdTable,
    mcs: &[u8],
    trials_per_point: usize,
    seed: u64,
) -> Result<AgreementReport> {
    let opts = LinkOptions {
        frame: table.frame,
        ..LinkOptions::default()
    };
    let split = PowerSplit::new(0.0, 1.0)?;
    let mut report = AgreementReport {
        comparisons: 0,
        agreements: 0,
        points: Vec::new(),
    };
    for &index in mcs {
        let entry = table.entry(index)?;
        let plan = StreamPlan::new([index; 3], split)?;
        for point in &entry.grid {
            let (pair, noise_var) = scalar_link(point.snr_db);
            let pairs = (0..trials_per_point)
                .into_par_iter()
                .map(|r| {
                    let s = derive_seed(seed, &[u64::from(index), snr_key(point.snr_db), r as u64]);
                    let full = run_trial_with(&pair, &plan, noise_var, s, &opts)?;
                    let fast = run_trial_fast(&pair, &plan, noise_var, table, s)?;
                    Ok((full.common_ok(), fast.common_ok()))
                })
                .collect::<Result<Vec<_>>>()?;
            let (mut full_ok, mut fast_ok) = (0usize, 0usize);
            for (full, fast) in &pairs {
                for u in 0..2 {
                    report.comparisons += 1;
                    report.agreements += usize::from(full[u] == fast[u]);
                    full_ok += usize::from(full[u]);
                    fast_ok += usize::from(fast[u]);
                }
            }
            let n = 2 * trials_per_point;
            report.points.push(PointAgreement {
                mcs: index,
                snr_db: point.snr_db,
                trials: n,
                p_full: full_ok as f64 / n as f64,
                p_fast: fast_ok as f64 / n as f64,
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(snr_db: f64, successes: usize) -> CurvePoint {
        CurvePoint {
            snr_db,
            successes,
            trials: 100,
        }
    }

    #[test]
    fn isotonic_pools_violators() {
        let pts = [pt(0.0, 10), pt(1.0, 30), pt(2.0, 20), pt(3.0, 90)];
        let fit = isotonic(&pts);
        assert_eq!(fit, vec![0.1, 0.25, 0.25, 0.9]);
        assert!((crossing(&pts, &fit, 0.5).unwrap() - (2.0 + 0.25 / 0.65)).abs() < 1e-12);
        assert!(crossing(&pts, &fit, 0.95).is_none());
    }

    #[test]
    fn large_drop_is_rejected() {
        let mcs = mcs_params(0).unwrap();
        assert!(check_monotone(&mcs, &[pt(0.0, 90), pt(1.0, 10)]).is_err());
        assert!(check_monotone(&mcs, &[pt(0.0, 52), pt(1.0, 48)]).is_ok());
    }

    #[test]
    fn too_few_runs_rejected() {
        let frame = FrameConfig::default();
        let err = calibrate_mcs(mcs_params(0).unwrap(), &frame, &CalibrationOptions::new(50)).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { .. }));
    }
}
