use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::{ExperimentConfig, ExperimentResult};
use crate::error::{Error, Result};
use crate::rates::{sum_rate, RatePoint};
use crate::region::{DominanceRecord, RateRegion, SweepTable};
use crate::waveform::BANDWIDTH_MHZ;

/// Six significant digits, plain decimal notation for moderate magnitudes,
/// trailing zeros removed.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x == 0.0 { "0".into() } else { format!("{x}") };
    }
    let mag = x.abs();
    if !(1e-4..1e15).contains(&mag) {
        return format!("{x:.5e}");
    }
    let exp = mag.log10().floor() as i32;
    let mut s = format!("{:.*}", (5 - exp).max(0) as usize, x);
    if s.trim_start_matches('-').trim_start_matches("0.").trim_start_matches('0').replace('.', "").len() > 6 {
        s = format!("{:.*}", (4 - exp).max(0) as usize, x);
    }
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

pub fn round_sig6(x: f64) -> f64 {
    format_sig6(x).parse().unwrap_or(x)
}

fn opt6(x: Option<f64>) -> Value {
    x.map_or(Value::Null, |v| json!(round_sig6(v)))
}

fn point(p: &RatePoint) -> Value {
    json!({
        "r_uni_bpshz": round_sig6(p.r_uni),
        "r_mult_bpshz": round_sig6(p.r_mult),
        "uni_mbps": round_sig6(p.uni_mbps()),
        "mult_mbps": round_sig6(p.mult_mbps()),
    })
}

/// One row per evaluated `(t, triple)`.
pub fn sweep_csv(table: &SweepTable) -> String {
    let mut out = String::from(
        "t,mcs_c,mcs_1,mcs_2,p_common_both,p_priv1,p_priv2,rc_bpshz,r1_bpshz,r2_bpshz,sum_mbps\n",
    );
    for row in &table.rows {
        let r = &row.rates;
        let fields = [
            format_sig6(row.t),
            row.mcs[0].to_string(),
            row.mcs[1].to_string(),
            row.mcs[2].to_string(),
            format_sig6(r.success_probs[0]),
            format_sig6(r.success_probs[1]),
            format_sig6(r.success_probs[2]),
            format_sig6(r.r_c),
            format_sig6(r.r_1),
            format_sig6(r.r_2),
            format_sig6(r.sum_mbps()),
        ];
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}

/// Per `t`: throughput of each stream under the best triple.
pub fn bars_csv(region: &RateRegion) -> String {
    let mut out =
        String::from("t,mcs_c,mcs_1,mcs_2,common_mbps,private1_mbps,private2_mbps,sum_mbps,common_share,is_t_star\n");
    for rec in &region.per_t {
        let r = &rec.rates;
        let sum = sum_rate(r);
        let share = if sum > 0.0 { r.r_c / sum } else { 0.0 };
        let fields = [
            format_sig6(rec.t),
            rec.mcs[0].to_string(),
            rec.mcs[1].to_string(),
            rec.mcs[2].to_string(),
            format_sig6(r.r_c * BANDWIDTH_MHZ),
            format_sig6(r.r_1 * BANDWIDTH_MHZ),
            format_sig6(r.r_2 * BANDWIDTH_MHZ),
            format_sig6(sum * BANDWIDTH_MHZ),
            format_sig6(share),
            u8::from(rec.t == region.t_star).to_string(),
        ];
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}

fn dominance_row(rec: &DominanceRecord) -> Value {
    json!({
        "r_0_bpshz": round_sig6(rec.r_0),
        "mulp_t": opt6(rec.mulp_t),
        "mulp_uni_bpshz": opt6(rec.mulp_uni),
        "rsma_uni_bpshz": opt6(rec.rsma_uni),
        "tolerance_bpshz": round_sig6(rec.tolerance()),
        "rsma_dominates": rec.rsma_dominates,
    })
}

/// Region document: best plans per `t`, segments, boundaries, landmarks
/// and the dominance table.
pub fn region_json(result: &ExperimentResult, cfg: &ExperimentConfig) -> Result<String> {
    let region = &result.region;
    let per_t: Vec<Value> = region
        .per_t
        .iter()
        .map(|rec| {
            let r = &rec.rates;
            json!({
                "t": round_sig6(rec.t),
                "mcs": rec.mcs,
                "rc_bpshz": round_sig6(r.r_c),
                "r1_bpshz": round_sig6(r.r_1),
                "r2_bpshz": round_sig6(r.r_2),
                "success_probs": r.success_probs.map(round_sig6),
                "sum_mbps": round_sig6(r.sum_mbps()),
                "segment": [point(&rec.mulp), point(&rec.unicast)],
            })
        })
        .collect();
    let lm = &region.landmarks;
    let e: Vec<Value> = result
        .dominance
        .iter()
        .filter_map(|l| region.landmark_e(l.r_0).map(|p| json!({"r_0_bpshz": round_sig6(l.r_0), "point": point(&p)})))
        .collect();
    let doc = json!({
        "scenario": {
            "preset": cfg.preset.name(),
            "rho": round_sig6(cfg.channel.rho),
            "pathloss_delta_db": round_sig6(cfg.channel.pathloss_delta_db),
            "snr_db": round_sig6(cfg.channel.snr_db),
            "csit_error_var": round_sig6(cfg.channel.csit_error_var),
            "ensemble": cfg.ensemble,
        },
        "mode": match cfg.sweep.mode { crate::region::LinkMode::Full => "full", crate::region::LinkMode::Fast => "fast" },
        "runs": cfg.sweep.runs,
        "base_seed": cfg.base_seed,
        "t_star": round_sig6(region.t_star),
        "per_t": per_t,
        "hull": region.hull.iter().map(point).collect::<Vec<_>>(),
        "mulp_hull": region.mulp_hull.iter().map(point).collect::<Vec<_>>(),
        "hull_area_gap_bpshz2": round_sig6(region.hull_area_gap()),
        "landmarks": {
            "A": point(&lm.a),
            "B": point(&lm.b),
            "D": point(&lm.d),
            "F": point(&lm.f),
            "E": e,
        },
        "dominance": result.dominance.iter().map(dominance_row).collect::<Vec<_>>(),
    });
    serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))
}

/// Writes `contents` to a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Writes the sweep CSV, region JSON, bars CSV and the effective
/// configuration into the output directory; returns the written paths.
pub fn emit_results(result: &ExperimentResult, cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let dir = &cfg.output.dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = [
        (&cfg.output.sweep_csv, sweep_csv(&result.sweep)),
        (&cfg.output.region_json, region_json(result, cfg)?),
        (&cfg.output.bars_csv, bars_csv(&result.region)),
        (&cfg.output.config_toml, cfg.to_toml()?),
    ];
    let mut written = Vec::new();
    for (name, contents) in files {
        let path = dir.join(name);
        write_atomic(&path, &contents)?;
        written.push(path);
    }
    Ok(written)
}
