//! Fast-mode sweep of one preset: best triple per power split, the RSMA and
//! MULP boundaries and the landmarks.
//!
//! ```text
//! cargo run --release --example rate_region -- [case1..case4] [runs]
//! ```

use std::sync::Arc;

use noum::channel::Preset;
use noum::experiment::bundled_thresholds;
use noum::region::{build_region, LinkMode, Scenario, SweepConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let preset: Preset = args.next().unwrap_or_else(|| "case2".into()).parse()?;
    let runs: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(50);
    let mut scenario = Scenario::new(preset.config(), 2024).with_thresholds(Arc::new(bundled_thresholds()?));
    scenario.ensemble = true;
    let cfg = SweepConfig { runs, mode: LinkMode::Fast, ..SweepConfig::default() };
    let (region, _) = build_region(&scenario, &cfg)?;

    println!("{preset}: t* = {}", region.t_star);
    println!("  t    mcs        common  private  sum (Mbps)");
    for r in &region.per_t {
        println!(
            "{:4.1}  {:?}  {:6.1}  {:7.1}  {:6.1}",
            r.t,
            r.mcs,
            r.rates.r_c * 12.0,
            r.rates.private_sum() * 12.0,
            r.rates.sum_mbps()
        );
    }
    let l = region.landmarks;
    for (name, p) in [("A", l.a), ("B", l.b), ("D", l.d), ("F", l.f)] {
        println!("{name}: unicast {:6.1} Mbps, multicast {:6.1} Mbps", p.uni_mbps(), p.mult_mbps());
    }
    println!("RSMA boundary:");
    for p in &region.hull {
        println!("  ({:6.1}, {:6.1})", p.uni_mbps(), p.mult_mbps());
    }
    println!("area gap over MULP: {:.3} (bit/s/Hz)^2", region.hull_area_gap());
    Ok(())
}
