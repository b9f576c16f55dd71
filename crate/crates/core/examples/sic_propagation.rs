//! Full-waveform trials at a high private power share: when the common
//! stream fails, the private streams behind it fail too.
//!
//! ```text
//! cargo run --release --example sic_propagation -- [snr_db] [runs]
//! ```

use noum::channel::{scenario_channel, ChannelConfig, Preset};
use noum::link::{run_trial, StreamPlan};
use noum::precoder::PowerSplit;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let snr_db: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10.0);
    let runs: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);
    let cfg = ChannelConfig { snr_db, ..Preset::Case2.config() };
    println!("case2 at {snr_db} dB, MCS 0 on all streams");
    println!("  t    common ok  private ok  private ok | common failed");
    for t in [0.3, 0.5, 0.7, 0.9] {
        let plan = StreamPlan::new([0, 0, 0], PowerSplit::new(t, 1.0)?)?;
        let (mut common, mut private, mut orphan) = (0, 0, 0);
        for run in 0..runs {
            let pair = scenario_channel(&cfg, run)?;
            let o = run_trial(&pair, &plan, cfg.noise_variance(&pair, 1.0), run)?;
            for i in 0..2 {
                common += usize::from(o.common_ok()[i]);
                private += usize::from(o.private_ok()[i]);
                orphan += usize::from(o.private_ok()[i] && !o.common_ok()[i]);
            }
        }
        let n = 2 * runs as usize;
        println!("{t:4.1}  {common:>5}/{n}  {private:>6}/{n}  {orphan:>10}/{n}");
    }
    Ok(())
}
