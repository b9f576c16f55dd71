//! Common-stream MRT and private-stream ZF precoders for a power split `t`.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelPair;
use crate::error::{Error, Result};
use crate::linalg::{add, inner, norm, orthogonal_unit, scale_re, unit, CVec2, ZERO2};

/// Norm below which `û1 + û2` counts as zero.
pub const DIRECTION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSplit {
    /// Fraction of the power given to the two private streams.
    pub t: f64,
    pub p_total: f64,
}

impl PowerSplit {
    pub fn new(t: f64, p_total: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::param("t", format!("{t} is outside [0, 1]")));
        }
        if !(p_total > 0.0) || !p_total.is_finite() {
            return Err(Error::param("p_total", format!("{p_total} must be positive")));
        }
        Ok(Self { t, p_total })
    }

    pub fn common_power(&self) -> f64 {
        self.p_total * (1.0 - self.t)
    }

    pub fn private_power(&self) -> f64 {
        self.p_total * self.t / 2.0
    }

    pub fn has_common(&self) -> bool {
        self.t < 1.0
    }

    pub fn has_private(&self) -> bool {
        self.t > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecoderSet {
    pub p_c: CVec2,
    pub p_1: CVec2,
    pub p_2: CVec2,
}

impl PrecoderSet {
    /// Precoders in stream order `[c, 1, 2]`.
    pub fn streams(&self) -> [CVec2; 3] {
        [self.p_c, self.p_1, self.p_2]
    }

    pub fn total_power(&self) -> f64 {
        self.streams().iter().map(crate::linalg::norm_sqr).sum()
    }
}

fn direction(h: &CVec2) -> Result<CVec2> {
    unit(h).ok_or(Error::DegenerateChannel("zero-norm channel estimate"))
}

/// `√(P(1−t)) (û1 + û2)/‖û1 + û2‖`; zero at `t = 1`.
pub fn common_precoder(h1_hat: &CVec2, h2_hat: &CVec2, split: PowerSplit) -> Result<CVec2> {
    if !split.has_common() {
        return Ok(ZERO2);
    }
    let sum = add(&direction(h1_hat)?, &direction(h2_hat)?);
    let n = norm(&sum);
    if n < DIRECTION_TOL {
        return Err(Error::DegenerateGeometry("anti-parallel channel estimates"));
    }
    Ok(scale_re(&sum, split.common_power().sqrt() / n))
}

/// `p_i = √(P t/2) û_j⊥`, so user `j`'s estimate sees no leakage from `p_i`.
pub fn private_precoders(h1_hat: &CVec2, h2_hat: &CVec2, split: PowerSplit) -> Result<(CVec2, CVec2)> {
    let null1 = orthogonal_unit(h1_hat).ok_or(Error::DegenerateChannel("zero-norm channel estimate"))?;
    let null2 = orthogonal_unit(h2_hat).ok_or(Error::DegenerateChannel("zero-norm channel estimate"))?;
    let amp = split.private_power().sqrt();
    Ok((scale_re(&null2, amp), scale_re(&null1, amp)))
}

/// All three precoders from the transmitter's estimates in `pair`.
pub fn precoder_set(pair: &ChannelPair, split: PowerSplit) -> Result<PrecoderSet> {
    let p_c = common_precoder(&pair.h1_hat, &pair.h2_hat, split)?;
    let (p_1, p_2) = private_precoders(&pair.h1_hat, &pair.h2_hat, split)?;
    Ok(PrecoderSet { p_c, p_1, p_2 })
}

/// `|h_iᴴ p_x|²` on the true channels; rows are users, columns `[c, 1, 2]`.
pub fn effective_gains(pair: &ChannelPair, pre: &PrecoderSet) -> [[f64; 3]; 2] {
    let streams = pre.streams();
    pair.true_channels()
        .map(|h| streams.map(|p| inner(&h, &p).norm_sqr()))
}
