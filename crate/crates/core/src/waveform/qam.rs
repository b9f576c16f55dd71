//! Gray-mapped square QAM (BPSK for one bit per symbol) and soft demapping.
//!
//! Bit order: the first `m/2` bits of a symbol select the in-phase level and
//! the last `m/2` the quadrature level. On each axis the first bit is the
//! sign (0 → positive) and the remaining bits Gray-code the magnitude, so
//! QPSK maps `00` to `(1 + j)/√2`. Constellations are scaled to unit average
//! energy. LLRs are positive when bit 0 is more likely.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Soft-demapper flavour.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LlrMode {
    #[default]
    MaxLog,
    Exact,
}

/// One axis of the constellation: `levels[label]` is the amplitude of the
/// `bits`-bit label.
#[derive(Debug)]
struct Pam {
    bits: usize,
    levels: Vec<f64>,
}

impl Pam {
    fn new(bits: usize, scale: f64) -> Self {
        let size = 1usize << bits;
        let mut levels = vec![0.0; size];
        for i in 0..size {
            let label = i ^ (i >> 1);
            levels[label] = ((size - 1) as f64 - 2.0 * i as f64) * scale;
        }
        Self { bits, levels }
    }

    fn map(&self, bits: &[u8]) -> f64 {
        let label = bits.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b & 1));
        self.levels[label]
    }

    /// Appends the LLRs of this axis' bits given observation `y` and noise
    /// variance `var` per complex sample.
    fn llrs(&self, y: f64, var: f64, mode: LlrMode, out: &mut Vec<f64>) {
        for j in 0..self.bits {
            let shift = self.bits - 1 - j;
            match mode {
                LlrMode::MaxLog => {
                    let (mut d0, mut d1) = (f64::INFINITY, f64::INFINITY);
                    for (label, &a) in self.levels.iter().enumerate() {
                        let d = (y - a) * (y - a);
                        if (label >> shift) & 1 == 0 {
                            d0 = d0.min(d);
                        } else {
                            d1 = d1.min(d);
                        }
                    }
                    out.push((d1 - d0) / var);
                }
                LlrMode::Exact => {
                    let metric =
                        |bit: usize| -> f64 {
                            let terms: Vec<f64> = self
                                .levels
                                .iter()
                                .enumerate()
                                .filter(|(label, _)| (label >> shift) & 1 == bit)
                                .map(|(_, &a)| -(y - a) * (y - a) / var)
                                .collect();
                            let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                            max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
                        };
                    out.push(metric(0) - metric(1));
                }
            }
        }
    }
}

#[derive(Debug)]
struct Constellation {
    m: usize,
    axis: Pam,
}

fn constellation(m: u8) -> Result<&'static Constellation> {
    static TABLES: [OnceLock<Constellation>; 5] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    let slot = match m {
        1 => 0,
        2 => 1,
        4 => 2,
        6 => 3,
        8 => 4,
        _ => {
            return Err(Error::param(
                "m",
                format!("unsupported bits per symbol {m}"),
            ))
        }
    };
    Ok(TABLES[slot].get_or_init(|| {
        let m = usize::from(m);
        if m == 1 {
            Constellation {
                m,
                axis: Pam::new(1, 1.0),
            }
        } else {
            let size = (1usize << (m / 2)) as f64;
            let scale = 1.0 / (2.0 * (size * size - 1.0) / 3.0).sqrt();
            Constellation {
                m,
                axis: Pam::new(m / 2, scale),
            }
        }
    }))
}

/// All `2^m` constellation points, indexed by their bit label (MSB first).
pub fn constellation_points(m: u8) -> Result<Vec<Complex64>> {
    let c = constellation(m)?;
    let count = 1usize << c.m;
    let mut pts = Vec::with_capacity(count);
    let mut bits = vec![0u8; c.m];
    for label in 0..count {
        for (j, b) in bits.iter_mut().enumerate() {
            *b = ((label >> (c.m - 1 - j)) & 1) as u8;
        }
        pts.push(qam_modulate(&bits, m)?[0]);
    }
    Ok(pts)
}

pub fn qam_modulate(bits: &[u8], m: u8) -> Result<Vec<Complex64>> {
    let c = constellation(m)?;
    if !bits.len().is_multiple_of(c.m) {
        return Err(Error::param(
            "bits",
            format!("length {} is not a multiple of {}", bits.len(), c.m),
        ));
    }
    Ok(bits
        .chunks(c.m)
        .map(|sym| {
            if c.m == 1 {
                Complex64::new(c.axis.map(sym), 0.0)
            } else {
                let (i, q) = sym.split_at(c.m / 2);
                Complex64::new(c.axis.map(i), c.axis.map(q))
            }
        })
        .collect())
}

/// Max-log LLRs under circular Gaussian noise of variance `noise_var`.
pub fn qam_demodulate_llr(symbols: &[Complex64], m: u8, noise_var: f64) -> Result<Vec<f64>> {
    qam_demodulate_llr_with(symbols, m, noise_var, LlrMode::MaxLog)
}

pub fn qam_demodulate_llr_with(
    symbols: &[Complex64],
    m: u8,
    noise_var: f64,
    mode: LlrMode,
) -> Result<Vec<f64>> {
    if !(noise_var > 0.0) {
        return Err(Error::NonPositiveNoiseVariance(noise_var));
    }
    let c = constellation(m)?;
    let mut out = Vec::with_capacity(symbols.len() * c.m);
    for y in symbols {
        c.axis.llrs(y.re, noise_var, mode, &mut out);
        if c.m > 1 {
            c.axis.llrs(y.im, noise_var, mode, &mut out);
        }
    }
    Ok(out)
}
