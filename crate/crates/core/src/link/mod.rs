//! One end-to-end trial: three precoded streams are superposed, pass the
//! two users' channels and are SIC-decoded at each user. The full mode runs
//! the complete waveform; the fast mode compares SINRs against calibrated
//! per-MCS thresholds.

mod calibrate;
mod fast;

pub use calibrate::{
    calibrate_mcs, calibrate_thresholds, calibrate_thresholds_with, validate_fast_mode,
    AgreementReport, CalibrationOptions, PointAgreement, CALIBRATION_SEED,
};
pub use fast::{run_trial_fast, CurvePoint, ThresholdEntry, ThresholdTable, TABLE_VERSION};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelPair;
use crate::error::Result;
use crate::linalg::{inner, CVec2};
use crate::precoder::{effective_gains, precoder_set, PowerSplit, PrecoderSet};
use crate::seed::derive_seed;
use crate::waveform::ofdm::ofdm_extract_pilots;
use crate::waveform::{mcs_params, ofdm_assemble, ofdm_extract, FrameConfig, LlrMode, McsLevel, StreamCodec, DEFAULT_PILOTS};

/// SINR reported for a stream that receives no power.
pub const SINR_FLOOR_DB: f64 = -300.0;

/// Smallest noise variance handed to the demapper.
const MIN_DEMAP_VAR: f64 = 1e-12;

/// Walsh covers on the four pilot subcarriers, one per stream `[c, 1, 2]`,
/// so a receiver can separate the streams' pilots.
const PILOT_COVERS: [[f64; 4]; 3] = [[1.0, 1.0, 1.0, 1.0], [1.0, -1.0, 1.0, -1.0], [1.0, 1.0, -1.0, -1.0]];

/// MCS triple and power split of one transmission.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StreamPlan {
    pub mcs_c: McsLevel,
    pub mcs_1: McsLevel,
    pub mcs_2: McsLevel,
    pub split: PowerSplit,
}

impl StreamPlan {
    pub fn new(indices: [u8; 3], split: PowerSplit) -> Result<Self> {
        Ok(Self {
            mcs_c: mcs_params(indices[0])?,
            mcs_1: mcs_params(indices[1])?,
            mcs_2: mcs_params(indices[2])?,
            split,
        })
    }

    pub fn levels(&self) -> [McsLevel; 3] {
        [self.mcs_c, self.mcs_1, self.mcs_2]
    }

    pub fn indices(&self) -> [u8; 3] {
        self.levels().map(|m| m.index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub common_ok_u1: bool,
    pub common_ok_u2: bool,
    pub private_ok_u1: bool,
    pub private_ok_u2: bool,
    /// Common-stream SINR per user, dB.
    pub sinr_common: [f64; 2],
    /// Private-stream SINR per user after ideal cancellation, dB.
    pub sinr_private: [f64; 2],
}

impl TrialOutcome {
    pub fn common_ok(&self) -> [bool; 2] {
        [self.common_ok_u1, self.common_ok_u2]
    }

    pub fn private_ok(&self) -> [bool; 2] {
        [self.private_ok_u1, self.private_ok_u2]
    }
}

/// Linear SINRs of the decode chain at both users.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrValues {
    pub common: [f64; 2],
    pub private: [f64; 2],
}

impl SinrValues {
    pub fn common_db(&self) -> [f64; 2] {
        self.common.map(to_db)
    }

    pub fn private_db(&self) -> [f64; 2] {
        self.private.map(to_db)
    }
}

pub(crate) fn to_db(x: f64) -> f64 {
    if x > 0.0 {
        10.0 * x.log10()
    } else {
        SINR_FLOOR_DB
    }
}

fn ratio(signal: f64, disturbance: f64) -> f64 {
    if signal == 0.0 {
        0.0
    } else if disturbance == 0.0 {
        f64::INFINITY
    } else {
        signal / disturbance
    }
}

/// `Γ_{c,i} = |h_iᴴp_c|² / (|h_iᴴp_1|² + |h_iᴴp_2|² + σ²)` and
/// `Γ_i = |h_iᴴp_i|² / (|h_iᴴp_j|² + σ²)`.
pub fn sinr_values(pair: &ChannelPair, pre: &PrecoderSet, noise_var: f64) -> SinrValues {
    let g = effective_gains(pair, pre);
    let common = [0, 1].map(|i| ratio(g[i][0], g[i][1] + g[i][2] + noise_var));
    let private = [0, 1].map(|i| ratio(g[i][1 + i], g[i][2 - i] + noise_var));
    SinrValues { common, private }
}

/// How the receivers learn their effective per-stream gains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReceiverCsi {
    /// True `h_iᴴ p_x`.
    #[default]
    Genie,
    /// Least-squares estimates from the Walsh-covered pilots.
    LsPilots,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LinkOptions {
    pub frame: FrameConfig,
    pub receiver: ReceiverCsi,
    pub llr_mode: LlrMode,
}

/// Pilot values of stream `x`.
pub fn stream_pilots(x: usize) -> [Complex64; 4] {
    std::array::from_fn(|k| DEFAULT_PILOTS[k] * PILOT_COVERS[x][k])
}

/// Per-sample transmit vectors `x[n] = p_c s_c[n] + p_1 s_1[n] + p_2 s_2[n]`.
/// Absent streams are `None`.
pub fn superpose(pre: &PrecoderSet, streams: &[Option<Vec<Complex64>>; 3], len: usize) -> Vec<CVec2> {
    let precoders = pre.streams();
    let mut x = vec![[Complex64::new(0.0, 0.0); 2]; len];
    for (p, s) in precoders.iter().zip(streams) {
        if let Some(s) = s {
            for (xn, &sn) in x.iter_mut().zip(s) {
                xn[0] += p[0] * sn;
                xn[1] += p[1] * sn;
            }
        }
    }
    x
}

fn complex_noise<R: Rng>(rng: &mut R, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

/// Time-domain frames of the active streams and their payloads.
struct Transmission {
    codecs: [StreamCodec; 3],
    payloads: [Option<Vec<u8>>; 3],
    frames: [Option<Vec<Complex64>>; 3],
}

fn transmit(plan: &StreamPlan, seed: u64, opts: &LinkOptions) -> Result<Transmission> {
    let levels = plan.levels();
    let codecs = [0, 1, 2].map(|x| StreamCodec::new(levels[x], &opts.frame).map(|c| c.with_llr_mode(opts.llr_mode)));
    let [c0, c1, c2] = codecs;
    let codecs = [c0?, c1?, c2?];
    let active = [plan.split.has_common(), plan.split.has_private(), plan.split.has_private()];
    let mut payloads: [Option<Vec<u8>>; 3] = [None, None, None];
    let mut frames: [Option<Vec<Complex64>>; 3] = [None, None, None];
    for x in 0..3 {
        if !active[x] {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[1, x as u64]));
        let payload = codecs[x].random_payload(&mut rng);
        let symbols = codecs[x].modulate(&payload)?;
        frames[x] = Some(ofdm_assemble(&symbols, &opts.frame, &stream_pilots(x))?);
        payloads[x] = Some(payload);
    }
    Ok(Transmission {
        codecs,
        payloads,
        frames,
    })
}

fn ls_gains(samples: &[Complex64], frame: &FrameConfig) -> Result<[Complex64; 3]> {
    let pilots = ofdm_extract_pilots(samples, frame)?;
    let count = (pilots.len() * 4) as f64;
    Ok([0, 1, 2].map(|x| {
        let reference = stream_pilots(x);
        pilots
            .iter()
            .flat_map(|p| p.iter().zip(&reference).map(|(r, c)| r * c.conj()))
            .sum::<Complex64>()
            / count
    }))
}

/// Decodes one stream; returns `(crc_pass, matches_sent, bits)`.
fn decode_stream(
    codec: &StreamCodec,
    y: &[Complex64],
    gain: Complex64,
    var: f64,
    sent: &[u8],
) -> Result<(bool, bool, Vec<u8>)> {
    if gain.norm_sqr() == 0.0 {
        return Ok((false, false, vec![0; codec.payload_len()]));
    }
    let z: Vec<Complex64> = y.iter().map(|v| v / gain).collect();
    let var = (var / gain.norm_sqr()).max(MIN_DEMAP_VAR);
    let decoded = codec.decode(&z, var)?;
    let ok = decoded.success && decoded.bits == sent;
    Ok((decoded.success, ok, decoded.bits))
}

/// Full-waveform trial with the default options (genie receiver CSI,
/// max-log LLRs, default frame).
pub fn run_trial(pair: &ChannelPair, plan: &StreamPlan, noise_var: f64, seed: u64) -> Result<TrialOutcome> {
    run_trial_with(pair, plan, noise_var, seed, &LinkOptions::default())
}

/// Full-waveform trial. A success flag means the CRC passed and the decoded
/// payload equals the transmitted one. A user whose common CRC fails drops
/// the frame without attempting its private stream; a common CRC pass on
/// wrong bits still cancels the wrong replica.
pub fn run_trial_with(
    pair: &ChannelPair,
    plan: &StreamPlan,
    noise_var: f64,
    seed: u64,
    opts: &LinkOptions,
) -> Result<TrialOutcome> {
    let pre = precoder_set(pair, plan.split)?;
    let sinr = sinr_values(pair, &pre, noise_var);
    let tx = transmit(plan, seed, opts)?;
    let len = opts.frame.total_samples();
    let x = superpose(&pre, &tx.frames, len);
    let precoders = pre.streams();

    let mut common_ok = [false; 2];
    let mut private_ok = [false; 2];
    for (i, h) in pair.true_channels().iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[2, i as u64]));
        let y: Vec<Complex64> = x
            .iter()
            .map(|xn| {
                let clean = inner(h, xn);
                if noise_var > 0.0 {
                    clean + complex_noise(&mut rng, noise_var)
                } else {
                    clean
                }
            })
            .collect();
        let gains = match opts.receiver {
            ReceiverCsi::Genie => precoders.map(|p| inner(h, &p)),
            ReceiverCsi::LsPilots => ls_gains(&y, &opts.frame)?,
        };
        let mut data = ofdm_extract(&y, &opts.frame)?;
        let private_power = |x: usize| if tx.frames[x].is_some() { gains[x].norm_sqr() } else { 0.0 };

        let mut sic_ready = true;
        if let Some(sent) = &tx.payloads[0] {
            let interference = private_power(1) + private_power(2) + noise_var;
            let (crc, ok, bits) = decode_stream(&tx.codecs[0], &data, gains[0], interference, sent)?;
            common_ok[i] = ok;
            sic_ready = crc;
            let replica = tx.codecs[0].modulate(&bits)?;
            for (d, s) in data.iter_mut().zip(&replica) {
                *d -= gains[0] * s;
            }
        }
        let own = 1 + i;
        let other = 2 - i;
        if let (Some(sent), true) = (&tx.payloads[own], sic_ready) {
            let interference = private_power(other) + noise_var;
            let (_, ok, _) = decode_stream(&tx.codecs[own], &data, gains[own], interference, sent)?;
            private_ok[i] = ok;
        }
    }
    Ok(TrialOutcome {
        common_ok_u1: common_ok[0],
        common_ok_u2: common_ok[1],
        private_ok_u1: private_ok[0],
        private_ok_u2: private_ok[1],
        sinr_common: sinr.common_db(),
        sinr_private: sinr.private_db(),
    })
}

/// Receive SNR of a single-stream scalar link: `h1 = h2 = e1`, unit power,
/// everything in the common stream.
pub fn scalar_link(snr_db: f64) -> (ChannelPair, f64) {
    let e1 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    (ChannelPair::perfect(e1, e1), 10f64.powf(-snr_db / 10.0))
}
