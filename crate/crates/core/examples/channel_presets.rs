//! Draws one channel pair per preset and prints its geometry.
//!
//! ```text
//! cargo run --release --example channel_presets -- [seed]
//! ```

use noum::channel::{correlation, scenario_channel, Preset};
use noum::linalg::norm;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(1);
    println!("preset  rho   delta_db  |h1|    |h2|    corr    csit_err_1");
    for preset in Preset::ALL {
        let cfg = preset.config();
        let pair = scenario_channel(&cfg, seed)?;
        let err = [pair.h1_hat[0] - pair.h1[0], pair.h1_hat[1] - pair.h1[1]];
        println!(
            "{:<7} {:<5} {:<9} {:<7.3} {:<7.3} {:<7.3} {:.4}",
            preset.name(),
            cfg.rho,
            cfg.pathloss_delta_db,
            norm(&pair.h1),
            norm(&pair.h2),
            correlation(&pair)?,
            norm(&err) / norm(&pair.h1)
        );
    }
    Ok(())
}
