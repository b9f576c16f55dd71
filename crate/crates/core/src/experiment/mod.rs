//! Experiment orchestration: configuration, threshold provisioning, the
//! region sweep and result files.

mod config;
mod output;

pub use config::{
    parse_config, CalibrationConfig, ExperimentConfig, OutputConfig, DEFAULT_BASE_SEED, DEFAULT_CALIBRATION_RUNS,
    SEED_ENV_VAR,
};
pub use output::{bars_csv, emit_results, format_sig6, region_json, round_sig6, sweep_csv, write_atomic};

use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::link::{calibrate_thresholds, ThresholdTable};
use crate::region::{build_region, dominance_table, DominanceRecord, LinkMode, RateRegion, Scenario, SweepTable};
use crate::waveform::FrameConfig;

const BUNDLED_THRESHOLDS: &str = include_str!("../../data/thresholds.json");

/// Threshold table shipped with the crate (default frame).
pub fn bundled_thresholds() -> Result<ThresholdTable> {
    ThresholdTable::from_json(BUNDLED_THRESHOLDS)
}

pub fn load_thresholds_file(path: &Path) -> Result<ThresholdTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ThresholdTable::from_json(&text)
}

fn check_frame(table: &ThresholdTable, frame: &FrameConfig) -> Result<()> {
    if table.frame != *frame {
        return Err(Error::Calibration("threshold table was calibrated for a different frame".into()));
    }
    Ok(())
}

/// Thresholds for the configured frame: the configured file, else the
/// bundled table when it matches, else a fresh calibration.
pub fn provide_thresholds(cfg: &ExperimentConfig) -> Result<ThresholdTable> {
    let frame = cfg.frame();
    if let Some(path) = &cfg.calibration.file {
        let table = load_thresholds_file(path)?;
        check_frame(&table, &frame)?;
        return Ok(table);
    }
    match bundled_thresholds() {
        Ok(table) if table.frame == frame => Ok(table),
        _ => calibrate_thresholds(&frame, cfg.calibration.runs_per_point),
    }
}

pub fn scenario_for(cfg: &ExperimentConfig, thresholds: Option<Arc<ThresholdTable>>) -> Scenario {
    Scenario {
        channel: cfg.channel,
        p_total: 1.0,
        seed: cfg.base_seed,
        ensemble: cfg.ensemble,
        link: cfg.link,
        thresholds,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub region: RateRegion,
    pub sweep: SweepTable,
    pub dominance: Vec<DominanceRecord>,
}

/// Runs the configured sweep and reduces it to the region.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let thresholds = match cfg.sweep.mode {
        LinkMode::Fast => Some(Arc::new(provide_thresholds(cfg)?)),
        LinkMode::Full => None,
    };
    let scenario = scenario_for(cfg, thresholds);
    let (region, sweep) = build_region(&scenario, &cfg.sweep)?;
    let dominance = dominance_table(&region);
    Ok(ExperimentResult { region, sweep, dominance })
}
