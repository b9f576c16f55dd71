//! MCS-limited stream rates from trial outcomes and the split of the common
//! rate into multicast and unicast parts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link::{StreamPlan, TrialOutcome};
use crate::waveform::BANDWIDTH_MHZ;

/// Fraction `α = |W_0| / |W_c|` of the common stream carrying the multicast
/// message.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MessageSplit {
    alpha: f64,
}

impl MessageSplit {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::param("alpha", format!("{alpha} is outside [0, 1]")));
        }
        Ok(Self { alpha })
    }

    /// Common stream carries only the multicast message.
    pub const MULP: MessageSplit = MessageSplit { alpha: 1.0 };
    /// Common stream carries only unicast parts.
    pub const UNICAST: MessageSplit = MessageSplit { alpha: 0.0 };

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StreamRates {
    /// Common, private-1 and private-2 rates in bits/s/Hz.
    pub r_c: f64,
    pub r_1: f64,
    pub r_2: f64,
    /// Empirical success probabilities `[common at both users, private 1, private 2]`.
    pub success_probs: [f64; 3],
    /// Monte-Carlo standard errors of `[r_c, r_1, r_2]`.
    pub std_errors: [f64; 3],
    pub runs: usize,
}

impl StreamRates {
    pub const ZERO: StreamRates = StreamRates {
        r_c: 0.0,
        r_1: 0.0,
        r_2: 0.0,
        success_probs: [0.0; 3],
        std_errors: [0.0; 3],
        runs: 0,
    };

    pub fn private_sum(&self) -> f64 {
        self.r_1 + self.r_2
    }

    pub fn sum_mbps(&self) -> f64 {
        sum_rate(self) * BANDWIDTH_MHZ
    }
}

/// `(r_uni, r_mult)` pair in bits/s/Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub r_uni: f64,
    pub r_mult: f64,
}

impl RatePoint {
    pub fn new(r_uni: f64, r_mult: f64) -> Self {
        Self { r_uni, r_mult }
    }

    pub fn uni_mbps(&self) -> f64 {
        self.r_uni * BANDWIDTH_MHZ
    }

    pub fn mult_mbps(&self) -> f64 {
        self.r_mult * BANDWIDTH_MHZ
    }
}

fn fraction(outcomes: &[TrialOutcome], pred: impl Fn(&TrialOutcome) -> bool) -> f64 {
    outcomes.iter().filter(|o| pred(o)).count() as f64 / outcomes.len() as f64
}

/// `r_c = m_c r_c · P(common decoded at both users)`,
/// `r_i = m_i r_i · P(private i decoded)`.
pub fn empirical_stream_rates(outcomes: &[TrialOutcome], plan: &StreamPlan) -> Result<StreamRates> {
    if outcomes.is_empty() {
        return Err(Error::param("runs", "no trial outcomes"));
    }
    let probs = [
        fraction(outcomes, |o| o.common_ok_u1 && o.common_ok_u2),
        fraction(outcomes, |o| o.private_ok_u1),
        fraction(outcomes, |o| o.private_ok_u2),
    ];
    let se = plan.levels().map(|m| m.spectral_efficiency());
    let n = outcomes.len() as f64;
    let std_errors = std::array::from_fn(|x| se[x] * (probs[x] * (1.0 - probs[x]) / n).sqrt());
    Ok(StreamRates {
        r_c: se[0] * probs[0],
        r_1: se[1] * probs[1],
        r_2: se[2] * probs[2],
        success_probs: probs,
        std_errors,
        runs: outcomes.len(),
    })
}

/// `r_mult = α r_c`, `r_uni = (1 − α) r_c + r_1 + r_2`.
pub fn noum_split(rates: &StreamRates, split: MessageSplit) -> RatePoint {
    let a = split.alpha();
    RatePoint::new((1.0 - a) * rates.r_c + rates.r_1 + rates.r_2, a * rates.r_c)
}

/// Rate point of conventional multi-user linear precoding: the common stream
/// is the multicast message and the private streams carry all unicast data.
pub fn mulp_point(rates: &StreamRates) -> RatePoint {
    RatePoint::new(rates.r_1 + rates.r_2, rates.r_c)
}

pub fn sum_rate(rates: &StreamRates) -> f64 {
    rates.r_c + rates.r_1 + rates.r_2
}
