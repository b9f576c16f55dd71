//! Experiment configuration: a TOML document with dotted sections
//! (`scenario.rho`, `sweep.runs`, …). Every key is optional; unknown keys
//! are rejected.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelConfig, Preset};
use crate::error::{Error, Result};
use crate::link::{LinkOptions, ReceiverCsi};
use crate::region::{LinkMode, SweepConfig};
use crate::waveform::{FrameConfig, LlrMode};

/// Environment variable overriding `base_seed`.
pub const SEED_ENV_VAR: &str = "NOUM_BASE_SEED";

pub const DEFAULT_BASE_SEED: u64 = 2024;
pub const DEFAULT_CALIBRATION_RUNS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub sweep_csv: String,
    pub region_json: String,
    pub bars_csv: String,
    pub config_toml: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("results"),
            sweep_csv: "sweep.csv".into(),
            region_json: "region.json".into(),
            bars_csv: "bars.csv".into(),
            config_toml: "config.toml".into(),
        }
    }
}

/// Where fast-mode thresholds come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    /// Stored table; when absent the bundled table is used if it matches the
    /// frame, otherwise the thresholds are calibrated on the spot.
    pub file: Option<PathBuf>,
    pub runs_per_point: usize,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            file: None,
            runs_per_point: DEFAULT_CALIBRATION_RUNS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub channel: ChannelConfig,
    /// Fresh channel per run (default) instead of one fixed realization.
    pub ensemble: bool,
    pub sweep: SweepConfig,
    pub link: LinkOptions,
    pub base_seed: u64,
    pub calibration: CalibrationConfig,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            preset: Preset::Case1,
            channel: Preset::Case1.config(),
            ensemble: true,
            sweep: SweepConfig::default(),
            link: LinkOptions::default(),
            base_seed: DEFAULT_BASE_SEED,
            calibration: CalibrationConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    base_seed: Option<u64>,
    scenario: Option<RawScenario>,
    sweep: Option<RawSweep>,
    phy: Option<RawPhy>,
    calibration: Option<RawCalibration>,
    output: Option<RawOutput>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    preset: Option<String>,
    rho: Option<f64>,
    pathloss_delta_db: Option<f64>,
    snr_db: Option<f64>,
    csit_error_var: Option<f64>,
    ensemble: Option<bool>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    t_grid: Option<Vec<f64>>,
    mcs: Option<Vec<u8>>,
    runs: Option<usize>,
    mode: Option<String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhy {
    payload_symbols: Option<usize>,
    receiver: Option<ReceiverCsi>,
    llr: Option<LlrMode>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCalibration {
    file: Option<PathBuf>,
    runs_per_point: Option<usize>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
    sweep_csv: Option<String>,
    region_json: Option<String>,
    bars_csv: Option<String>,
    config_toml: Option<String>,
}

/// Parses and validates a configuration document, filling defaults.
/// `scenario = "case2"` is shorthand for `[scenario] preset = "case2"`.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let bad = |e: toml::de::Error| Error::Config(e.message().to_string());
    let mut doc: toml::Table = toml::from_str(text).map_err(bad)?;
    if let Some(toml::Value::String(name)) = doc.get("scenario") {
        let mut table = toml::Table::new();
        table.insert("preset".into(), toml::Value::String(name.clone()));
        doc.insert("scenario".into(), toml::Value::Table(table));
    }
    let raw: RawConfig = doc.try_into().map_err(bad)?;
    let mut cfg = ExperimentConfig::default();
    if let Some(seed) = raw.base_seed {
        cfg.base_seed = seed;
    }

    let sc = raw.scenario.unwrap_or_default();
    if let Some(name) = &sc.preset {
        cfg.preset = name.parse()?;
    }
    let mut channel = cfg.preset.config();
    channel.rho = sc.rho.unwrap_or(channel.rho);
    channel.pathloss_delta_db = sc.pathloss_delta_db.unwrap_or(channel.pathloss_delta_db);
    channel.snr_db = sc.snr_db.unwrap_or(channel.snr_db);
    channel.csit_error_var = sc.csit_error_var.unwrap_or(channel.csit_error_var);
    channel.validate()?;
    cfg.channel = channel;
    cfg.ensemble = sc.ensemble.unwrap_or(true);

    let sw = raw.sweep.unwrap_or_default();
    if let Some(t) = sw.t_grid {
        cfg.sweep.t_grid = t;
    }
    if let Some(m) = sw.mcs {
        cfg.sweep.mcs_indices = m;
    }
    if let Some(r) = sw.runs {
        cfg.sweep.runs = r;
    }
    if let Some(mode) = &sw.mode {
        cfg.sweep.mode = mode.parse()?;
    }
    cfg.sweep.validate()?;

    let phy = raw.phy.unwrap_or_default();
    if let Some(p) = phy.payload_symbols {
        cfg.link.frame.payload_symbols = p;
    }
    cfg.link.receiver = phy.receiver.unwrap_or_default();
    cfg.link.llr_mode = phy.llr.unwrap_or_default();
    if cfg.link.frame.payload_symbols == 0 {
        return Err(Error::param("phy.payload_symbols", "must be positive"));
    }
    cfg.link.frame.validate()?;

    let cal = raw.calibration.unwrap_or_default();
    cfg.calibration.file = cal.file;
    if let Some(r) = cal.runs_per_point {
        if r < 100 {
            return Err(Error::param("calibration.runs_per_point", "must be at least 100"));
        }
        cfg.calibration.runs_per_point = r;
    }

    let out = raw.output.unwrap_or_default();
    let defaults = OutputConfig::default();
    cfg.output = OutputConfig {
        dir: out.dir.unwrap_or(defaults.dir),
        sweep_csv: out.sweep_csv.unwrap_or(defaults.sweep_csv),
        region_json: out.region_json.unwrap_or(defaults.region_json),
        bars_csv: out.bars_csv.unwrap_or(defaults.bars_csv),
        config_toml: out.config_toml.unwrap_or(defaults.config_toml),
    };
    Ok(cfg)
}

impl ExperimentConfig {
    /// Full configuration document with every key explicit; parsing it
    /// gives back `self`.
    pub fn to_toml(&self) -> Result<String> {
        let raw = RawConfig {
            base_seed: Some(self.base_seed),
            scenario: Some(RawScenario {
                preset: Some(self.preset.name().to_string()),
                rho: Some(self.channel.rho),
                pathloss_delta_db: Some(self.channel.pathloss_delta_db),
                snr_db: Some(self.channel.snr_db),
                csit_error_var: Some(self.channel.csit_error_var),
                ensemble: Some(self.ensemble),
            }),
            sweep: Some(RawSweep {
                t_grid: Some(self.sweep.t_grid.clone()),
                mcs: Some(self.sweep.mcs_indices.clone()),
                runs: Some(self.sweep.runs),
                mode: Some(
                    match self.sweep.mode {
                        LinkMode::Full => "full",
                        LinkMode::Fast => "fast",
                    }
                    .to_string(),
                ),
            }),
            phy: Some(RawPhy {
                payload_symbols: Some(self.link.frame.payload_symbols),
                receiver: Some(self.link.receiver),
                llr: Some(self.link.llr_mode),
            }),
            calibration: Some(RawCalibration {
                file: self.calibration.file.clone(),
                runs_per_point: Some(self.calibration.runs_per_point),
            }),
            output: Some(RawOutput {
                dir: Some(self.output.dir.clone()),
                sweep_csv: Some(self.output.sweep_csv.clone()),
                region_json: Some(self.output.region_json.clone()),
                bars_csv: Some(self.output.bars_csv.clone()),
                config_toml: Some(self.output.config_toml.clone()),
            }),
        };
        toml::to_string(&raw).map_err(|e| Error::Config(e.to_string()))
    }

    /// Replaces `base_seed` with the value of [`SEED_ENV_VAR`], if given.
    pub fn apply_seed_override(&mut self, value: Option<&str>) -> Result<()> {
        if let Some(v) = value {
            self.base_seed = v
                .trim()
                .parse()
                .map_err(|_| Error::param(SEED_ENV_VAR, format!("`{v}` is not an unsigned integer")))?;
        }
        Ok(())
    }

    pub fn frame(&self) -> FrameConfig {
        self.link.frame
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.preset, Preset::Case1);
        assert_eq!(cfg.sweep.mode, LinkMode::Full);
        assert_eq!(cfg.sweep.runs, 50);
        assert_eq!(cfg.sweep.t_grid.len(), 11);
        assert_eq!(cfg.sweep.mcs_indices.len(), 10);
    }

    #[test]
    fn preset_lookup_and_overrides() {
        let cfg = parse_config("[scenario]\npreset = \"case4\"\n").unwrap();
        assert_eq!((cfg.channel.rho, cfg.channel.pathloss_delta_db), (0.95, 8.0));
        let cfg = parse_config("[scenario]\npreset = \"case2\"\nsnr_db = 12.5\n").unwrap();
        assert_eq!((cfg.channel.rho, cfg.channel.snr_db), (0.7, 12.5));
    }

    #[test]
    fn errors_name_the_key() {
        let err = parse_config("[scenario]\nrho = 1.5\n").unwrap_err();
        assert!(err.to_string().contains("rho"), "{err}");
        assert_eq!(err.exit_code(), 2);
        let err = parse_config("[sweep]\nspeed = 3\n").unwrap_err();
        assert!(err.to_string().contains("speed"), "{err}");
        let err = parse_config("[sweep]\nmode = \"turbo\"\n").unwrap_err();
        assert!(err.to_string().contains("sweep.mode"), "{err}");
        let err = parse_config("[sweep]\nmcs = [3, 12]\n").unwrap_err();
        assert!(err.to_string().contains("sweep.mcs"), "{err}");
    }

    #[test]
    fn effective_config_round_trips() {
        let text = "base_seed = 7\n[scenario]\npreset = \"case3\"\ncsit_error_var = 0.0\n\
                    [sweep]\nmode = \"fast\"\nruns = 3\nt_grid = [0.0, 0.25, 1.0]\nmcs = [0, 4]\n\
                    [phy]\nreceiver = \"ls_pilots\"\n[calibration]\nfile = \"t.json\"\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(parse_config(&cfg.to_toml().unwrap()).unwrap(), cfg);
        let default = ExperimentConfig::default();
        assert_eq!(parse_config(&default.to_toml().unwrap()).unwrap(), default);
    }

    #[test]
    fn seed_override() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_seed_override(Some("99")).unwrap();
        assert_eq!(cfg.base_seed, 99);
        cfg.apply_seed_override(None).unwrap();
        assert_eq!(cfg.base_seed, 99);
        assert!(cfg.apply_seed_override(Some("x")).is_err());
    }
}
