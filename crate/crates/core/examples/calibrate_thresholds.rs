//! Calibrates the fast-mode SINR thresholds on an AWGN link.
//!
//! ```text
//! cargo run --release --example calibrate_thresholds -- [runs_per_point] [out.json]
//! ```

use std::time::Instant;

use noum::link::calibrate_thresholds;
use noum::waveform::{mcs_params, FrameConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let runs: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(100);
    let out = args.next();

    let start = Instant::now();
    let table = calibrate_thresholds(&FrameConfig::default(), runs)?;
    println!("mcs  label        threshold_db  width_db  fine_points");
    for e in &table.entries {
        let mcs = mcs_params(e.mcs)?;
        println!(
            "{:>3}  {:<6} {:>5}  {:>12.2}  {:>8.2}  {:>11}",
            e.mcs,
            mcs.label(),
            format!("{}/{}", mcs.rate_num, mcs.rate_den),
            e.threshold_db,
            e.width_db,
            e.curve.len()
        );
    }
    println!("calibrated in {:.1} s", start.elapsed().as_secs_f64());
    if let Some(path) = out {
        std::fs::write(&path, table.to_json()?)?;
        println!("wrote {path}");
    }
    Ok(())
}
