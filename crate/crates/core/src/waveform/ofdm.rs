//! OFDM framing: 64-point unitary FFT, 48 data + 4 pilot subcarriers,
//! 12 guard/DC nulls and a 16-sample cyclic prefix.
//!
//! Occupied subcarriers are −26..=26 without DC, pilots sit on ±7 and ±21.
//! Data symbols fill the remaining subcarriers in increasing frequency order,
//! one OFDM symbol after another.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const PILOT_CARRIERS: [i32; 4] = [-21, -7, 7, 21];
const EDGE: i32 = 26;

/// Known pilot pattern (BPSK ±1).
pub const DEFAULT_PILOTS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(1.0, 0.0),
    Complex64::new(1.0, 0.0),
    Complex64::new(-1.0, 0.0),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameConfig {
    pub n_fft: usize,
    pub n_data: usize,
    pub n_pilot: usize,
    pub n_guard: usize,
    pub cp_len: usize,
    pub payload_symbols: usize,
}

impl Default for FrameConfig {
    fn default() -> Self {
        Self {
            n_fft: 64,
            n_data: 48,
            n_pilot: 4,
            n_guard: 12,
            cp_len: 16,
            payload_symbols: 50,
        }
    }
}

impl FrameConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_data + self.n_pilot + self.n_guard != self.n_fft {
            return Err(Error::param(
                "phy",
                "data + pilot + guard subcarriers must equal the FFT size",
            ));
        }
        let d = Self::default();
        if (self.n_fft, self.n_data, self.n_pilot, self.n_guard)
            != (d.n_fft, d.n_data, d.n_pilot, d.n_guard)
        {
            return Err(Error::param(
                "phy",
                "only the 64/48/4/12 subcarrier layout is supported",
            ));
        }
        if self.cp_len > self.n_fft {
            return Err(Error::param("phy.cp_len", "cyclic prefix longer than a symbol"));
        }
        if self.payload_symbols == 0 {
            return Err(Error::param("phy.payload_symbols", "must be at least 1"));
        }
        Ok(())
    }

    pub fn samples_per_symbol(&self) -> usize {
        self.n_fft + self.cp_len
    }

    pub fn total_samples(&self) -> usize {
        self.samples_per_symbol() * self.payload_symbols
    }

    pub fn data_symbols(&self) -> usize {
        self.n_data * self.payload_symbols
    }

    /// Fraction of FFT bins carrying energy (data + pilots).
    pub fn occupied_fraction(&self) -> f64 {
        (self.n_data + self.n_pilot) as f64 / self.n_fft as f64
    }
}

fn bin(carrier: i32) -> usize {
    carrier.rem_euclid(64) as usize
}

fn data_bins() -> &'static [usize] {
    static BINS: OnceLock<Vec<usize>> = OnceLock::new();
    BINS.get_or_init(|| {
        (-EDGE..=EDGE)
            .filter(|c| *c != 0 && !PILOT_CARRIERS.contains(c))
            .map(bin)
            .collect()
    })
}

type Plans = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

fn plans() -> &'static Plans {
    static PLANS: OnceLock<Plans> = OnceLock::new();
    PLANS.get_or_init(|| {
        let mut planner = FftPlanner::new();
        (planner.plan_fft_forward(64), planner.plan_fft_inverse(64))
    })
}

/// Builds the time-domain frame: per OFDM symbol, 48 data symbols and the 4
/// pilots go to their subcarriers, guards stay null, then IFFT and CP.
pub fn ofdm_assemble(
    data_syms: &[Complex64],
    frame: &FrameConfig,
    pilot_seq: &[Complex64; 4],
) -> Result<Vec<Complex64>> {
    frame.validate()?;
    Error::check_len("OFDM data symbols", frame.data_symbols(), data_syms.len())?;
    let (_, inverse) = plans();
    let scale = 1.0 / (frame.n_fft as f64).sqrt();
    let mut out = Vec::with_capacity(frame.total_samples());
    let mut grid = vec![Complex64::new(0.0, 0.0); frame.n_fft];
    for chunk in data_syms.chunks(frame.n_data) {
        grid.iter_mut().for_each(|g| *g = Complex64::new(0.0, 0.0));
        for (&b, &s) in data_bins().iter().zip(chunk) {
            grid[b] = s;
        }
        for (&c, &p) in PILOT_CARRIERS.iter().zip(pilot_seq) {
            grid[bin(c)] = p;
        }
        inverse.process(&mut grid);
        grid.iter_mut().for_each(|g| *g *= scale);
        out.extend_from_slice(&grid[frame.n_fft - frame.cp_len..]);
        out.extend_from_slice(&grid);
    }
    Ok(out)
}

fn demodulate_symbols(samples: &[Complex64], frame: &FrameConfig) -> Result<Vec<Vec<Complex64>>> {
    frame.validate()?;
    Error::check_len("OFDM samples", frame.total_samples(), samples.len())?;
    let (forward, _) = plans();
    let scale = 1.0 / (frame.n_fft as f64).sqrt();
    Ok(samples
        .chunks(frame.samples_per_symbol())
        .map(|sym| {
            let mut grid = sym[frame.cp_len..].to_vec();
            forward.process(&mut grid);
            grid.iter_mut().for_each(|g| *g *= scale);
            grid
        })
        .collect())
}

/// Strips the CP, applies the FFT and returns the data subcarriers in
/// assembly order.
pub fn ofdm_extract(samples: &[Complex64], frame: &FrameConfig) -> Result<Vec<Complex64>> {
    let grids = demodulate_symbols(samples, frame)?;
    Ok(grids
        .iter()
        .flat_map(|g| data_bins().iter().map(move |&b| g[b]))
        .collect())
}

/// Received pilot subcarriers, one array per OFDM symbol.
pub fn ofdm_extract_pilots(samples: &[Complex64], frame: &FrameConfig) -> Result<Vec<[Complex64; 4]>> {
    let grids = demodulate_symbols(samples, frame)?;
    Ok(grids
        .iter()
        .map(|g| {
            let mut p = [Complex64::new(0.0, 0.0); 4];
            for (o, &c) in p.iter_mut().zip(&PILOT_CARRIERS) {
                *o = g[bin(c)];
            }
            p
        })
        .collect())
}
