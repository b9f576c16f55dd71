use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use noum::channel::Preset;
use noum::experiment::{emit_results, parse_config, run_experiment, write_atomic, SEED_ENV_VAR};
use noum::link::calibrate_thresholds;
use noum::region::LinkMode;
use noum::waveform::FrameConfig;
use noum::{Error, Result};

#[derive(Parser)]
#[command(version, about = "RSMA vs MULP unicast-multicast link-level simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep power splits and MCS triples and write the rate region.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = ["fast", "full"])]
        mode: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Calibrate fast-mode SINR thresholds and write them as JSON.
    Calibrate {
        #[arg(long, default_value_t = 200)]
        runs: usize,
        #[arg(long, default_value = "thresholds.json")]
        out: PathBuf,
    },
    /// List the channel presets.
    Presets,
}

fn run(config: PathBuf, mode: Option<String>, out: Option<PathBuf>) -> Result<()> {
    let text = std::fs::read_to_string(&config).map_err(|e| Error::io(&config, e))?;
    let mut cfg = parse_config(&text)?;
    cfg.apply_seed_override(std::env::var(SEED_ENV_VAR).ok().as_deref())?;
    if let Some(mode) = mode {
        cfg.sweep.mode = mode.parse::<LinkMode>()?;
    }
    if let Some(dir) = out {
        cfg.output.dir = dir;
    }
    let result = run_experiment(&cfg)?;
    for path in emit_results(&result, &cfg)? {
        println!("wrote {}", path.display());
    }
    let star = result.region.star();
    println!(
        "t* = {}  sum throughput {:.2} Mbps  (mcs {:?})",
        star.t,
        star.rates.sum_mbps(),
        star.mcs
    );
    Ok(())
}

fn calibrate(runs: usize, out: PathBuf) -> Result<()> {
    let table = calibrate_thresholds(&FrameConfig::default(), runs)?;
    for e in &table.entries {
        println!("mcs {}  threshold {:6.2} dB  width {:.2} dB", e.mcs, e.threshold_db, e.width_db);
    }
    write_atomic(&out, &table.to_json()?)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn presets() {
    println!("name   rho   pathloss_delta_db  snr_db  csit_error_var");
    for p in Preset::ALL {
        let c = p.config();
        println!(
            "{:<6} {:<5} {:<18} {:<7} {}",
            p.name(),
            c.rho,
            c.pathloss_delta_db,
            c.snr_db,
            c.csit_error_var
        );
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, mode, out } => run(config, mode, out),
        Command::Calibrate { runs, out } => calibrate(runs, out),
        Command::Presets => {
            presets();
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
