//! Two-user MISO channel realizations with an exact inter-user correlation,
//! a pathloss offset for user 2 and an additive CSIT error model.
//!
//! `h1` is i.i.d. CN(0, 1) per entry. `h2` is built from the unit direction
//! `û1` of `h1` and its orthogonal complement `û1⊥`:
//! `h2 = g2 (ρ û1 + √(1 − ρ²) e^{jφ} û1⊥)` with `φ ~ U[0, 2π)` and
//! `g2² = 10^(−Δ/10) ‖h1‖²`, so `|û1ᴴ û2| = ρ` holds for every realization.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{add, inner, norm, norm_sqr, orthogonal_unit, scale, scale_re, unit, CVec2};
use crate::seed::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub n_tx: usize,
    /// Target inter-user correlation |û1ᴴ û2|.
    pub rho: f64,
    /// Extra pathloss of user 2 relative to user 1, dB.
    pub pathloss_delta_db: f64,
    /// Per-receive-antenna SNR of user 1 at full transmit power, dB.
    pub snr_db: f64,
    /// CSIT error variance relative to the channel power per entry.
    pub csit_error_var: f64,
}

/// Measurement-case presets. Cases 1-3 raise the correlation at equal
/// pathloss; case 4 keeps case 3's correlation with a weaker user 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Case1,
    Case2,
    Case3,
    Case4,
}

pub const DEFAULT_SNR_DB: f64 = 20.0;
pub const DEFAULT_CSIT_ERROR_VAR: f64 = 0.01;

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Case1, Preset::Case2, Preset::Case3, Preset::Case4];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Case1 => "case1",
            Preset::Case2 => "case2",
            Preset::Case3 => "case3",
            Preset::Case4 => "case4",
        }
    }

    pub fn config(&self) -> ChannelConfig {
        let (rho, pathloss_delta_db) = match self {
            Preset::Case1 => (0.3, 0.0),
            Preset::Case2 => (0.7, 0.0),
            Preset::Case3 => (0.95, 0.0),
            Preset::Case4 => (0.95, 8.0),
        };
        ChannelConfig {
            n_tx: 2,
            rho,
            pathloss_delta_db,
            snr_db: DEFAULT_SNR_DB,
            csit_error_var: DEFAULT_CSIT_ERROR_VAR,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::param("scenario.preset", format!("unknown preset `{s}`")))
    }
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Preset::Case1.config()
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_tx != 2 {
            return Err(Error::param("scenario.n_tx", "only 2 transmit antennas are supported"));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::param("scenario.rho", format!("{} is outside [0, 1]", self.rho)));
        }
        if !(self.pathloss_delta_db >= 0.0) || !self.pathloss_delta_db.is_finite() {
            return Err(Error::param(
                "scenario.pathloss_delta_db",
                format!("{} must be a finite value >= 0", self.pathloss_delta_db),
            ));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::param("scenario.snr_db", "must be finite"));
        }
        if !(self.csit_error_var >= 0.0) || !self.csit_error_var.is_finite() {
            return Err(Error::param(
                "scenario.csit_error_var",
                format!("{} must be a finite value >= 0", self.csit_error_var),
            ));
        }
        Ok(())
    }

    /// Receiver noise variance giving user 1 the configured per-antenna SNR
    /// when the whole power `p_total` is transmitted.
    pub fn noise_variance(&self, pair: &ChannelPair, p_total: f64) -> f64 {
        norm_sqr(&pair.h1) * p_total / (self.n_tx as f64 * 10f64.powf(self.snr_db / 10.0))
    }
}

/// True channels of both users and the transmitter's estimates of them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelPair {
    pub h1: CVec2,
    pub h2: CVec2,
    pub h1_hat: CVec2,
    pub h2_hat: CVec2,
}

impl ChannelPair {
    /// Pair with perfect CSIT.
    pub fn perfect(h1: CVec2, h2: CVec2) -> Self {
        Self {
            h1,
            h2,
            h1_hat: h1,
            h2_hat: h2,
        }
    }

    pub fn true_channels(&self) -> [CVec2; 2] {
        [self.h1, self.h2]
    }
}

fn complex_gaussian<R: Rng>(rng: &mut R, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

/// Draws a pair with the configured correlation and pathloss. The estimates
/// equal the true channels; see [`corrupt_csit`].
pub fn generate_channel_pair(cfg: &ChannelConfig, seed: u64) -> Result<ChannelPair> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h1 = [complex_gaussian(&mut rng, 1.0), complex_gaussian(&mut rng, 1.0)];
    let phi: f64 = rng.gen_range(0.0..2.0 * PI);
    let u1 = unit(&h1).ok_or(Error::DegenerateChannel("zero-norm draw for user 1"))?;
    let u1_perp = orthogonal_unit(&u1).ok_or(Error::DegenerateChannel("zero-norm draw for user 1"))?;
    let g2 = 10f64.powf(-cfg.pathloss_delta_db / 20.0) * norm(&h1);
    let along = scale_re(&u1, cfg.rho);
    let across = scale(&u1_perp, Complex64::from_polar((1.0 - cfg.rho * cfg.rho).sqrt(), phi));
    let h2 = scale_re(&add(&along, &across), g2);
    Ok(ChannelPair::perfect(h1, h2))
}

/// Replaces the estimates with `h_i + e_i`, `e_i` complex Gaussian with
/// per-entry variance `csit_error_var · ‖h_i‖² / n_tx`.
pub fn corrupt_csit(pair: &ChannelPair, cfg: &ChannelConfig, seed: u64) -> ChannelPair {
    if cfg.csit_error_var == 0.0 {
        return ChannelPair::perfect(pair.h1, pair.h2);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut noisy = |h: &CVec2| -> CVec2 {
        let var = cfg.csit_error_var * norm_sqr(h) / cfg.n_tx as f64;
        [
            h[0] + complex_gaussian(&mut rng, var),
            h[1] + complex_gaussian(&mut rng, var),
        ]
    };
    let h1_hat = noisy(&pair.h1);
    let h2_hat = noisy(&pair.h2);
    ChannelPair {
        h1: pair.h1,
        h2: pair.h2,
        h1_hat,
        h2_hat,
    }
}

/// `|h1ᴴ h2| / (‖h1‖ ‖h2‖)` of the true channels.
pub fn correlation(pair: &ChannelPair) -> Result<f64> {
    let (n1, n2) = (norm(&pair.h1), norm(&pair.h2));
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::DegenerateChannel("zero-norm channel vector"));
    }
    Ok((inner(&pair.h1, &pair.h2).norm() / (n1 * n2)).min(1.0))
}

/// Channel draw followed by the CSIT error, with sub-seeds derived from one
/// scenario seed.
pub fn scenario_channel(cfg: &ChannelConfig, seed: u64) -> Result<ChannelPair> {
    let pair = generate_channel_pair(cfg, derive_seed(seed, &[0xC4A1]))?;
    Ok(corrupt_csit(&pair, cfg, derive_seed(seed, &[0xC517])))
}
