//! For each multicast target on the grid, compares the unicast rate left
//! by rate-splitting with the best linearly precoded alternative.
//!
//! ```text
//! cargo run --release --example dominance -- [case1..case4]
//! ```

use std::sync::Arc;

use noum::channel::Preset;
use noum::experiment::bundled_thresholds;
use noum::region::{build_region, dominance_table, LinkMode, Scenario, SweepConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let preset: Preset = std::env::args().nth(1).unwrap_or_else(|| "case3".into()).parse()?;
    let mut scenario = Scenario::new(preset.config(), 2024).with_thresholds(Arc::new(bundled_thresholds()?));
    scenario.ensemble = true;
    let cfg = SweepConfig { mode: LinkMode::Fast, ..SweepConfig::default() };
    let (region, _) = build_region(&scenario, &cfg)?;
    let r_c_star = region.star().rates.r_c;
    println!("{preset}: t* = {}, r_c(t*) = {:.1} Mbps", region.t_star, r_c_star * 12.0);
    println!("r_0 (Mbps)  mulp t  mulp uni  rsma uni  tol   verdict");
    for rec in dominance_table(&region) {
        let (Some(t), Some(m), Some(r)) = (rec.mulp_t, rec.mulp_uni, rec.rsma_uni) else {
            println!("{:9.1}   infeasible", rec.r_0 * 12.0);
            continue;
        };
        let verdict = match (rec.r_0 <= r_c_star, r > m) {
            (true, true) => "rsma ahead",
            (true, false) => "tie",
            (false, _) => "beyond r_c(t*)",
        };
        println!(
            "{:9.1}   {t:6.1}  {:8.1}  {:8.1}  {:4.1}  {verdict}",
            rec.r_0 * 12.0,
            m * 12.0,
            r * 12.0,
            rec.tolerance() * 12.0
        );
    }
    Ok(())
}
