//! Builds the common (MRT) and private (ZF) precoders over the power split
//! and prints the effective gains and SINRs at both users.
//!
//! ```text
//! cargo run --release --example precoders -- [case1..case4]
//! ```

use noum::channel::{scenario_channel, Preset};
use noum::link::sinr_values;
use noum::precoder::{effective_gains, precoder_set, PowerSplit};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let preset: Preset = std::env::args().nth(1).unwrap_or_else(|| "case2".into()).parse()?;
    let cfg = preset.config();
    let pair = scenario_channel(&cfg, 3)?;
    let noise_var = cfg.noise_variance(&pair, 1.0);
    println!("{preset}: noise variance {noise_var:.3e}");
    println!("  t    |h1 pc|^2  |h1 p1|^2  |h1 p2|^2  sinr_c1  sinr_c2  sinr_1  sinr_2 (dB)");
    for k in 0..=10 {
        let t = k as f64 / 10.0;
        let pre = precoder_set(&pair, PowerSplit::new(t, 1.0)?)?;
        let g = effective_gains(&pair, &pre);
        let s = sinr_values(&pair, &pre, noise_var);
        let (c, p) = (s.common_db(), s.private_db());
        println!(
            "{t:4.1}  {:9.4}  {:9.4}  {:9.2e}  {:7.2}  {:7.2}  {:6.2}  {:6.2}",
            g[0][0], g[0][1], g[0][2], c[0], c[1], p[0], p[1]
        );
    }
    Ok(())
}
