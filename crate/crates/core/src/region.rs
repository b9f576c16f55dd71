//! Sweeps the power split and the MCS triples, builds the achievable
//! (unicast sum rate, multicast rate) region and checks the RSMA/MULP
//! dominance property.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{scenario_channel, ChannelConfig, ChannelPair};
use crate::error::{Error, Result};
use crate::link::{run_trial_fast, run_trial_with, LinkOptions, StreamPlan, ThresholdTable, TrialOutcome};
use crate::precoder::PowerSplit;
use crate::rates::{empirical_stream_rates, mulp_point, noum_split, sum_rate, MessageSplit, RatePoint, StreamRates};
use crate::seed::derive_seed;
use crate::waveform::MCS_COUNT;

/// Number of multicast targets in the dominance table.
pub const R0_GRID_POINTS: usize = 20;

/// Relative slack for comparing rates assembled in different orders.
const ROUNDING_TOL: f64 = 1e-12;

const CHANNEL_STREAM: u64 = 0xC4;
const TRIAL_STREAM: u64 = 0x7A;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkMode {
    #[default]
    Full,
    Fast,
}

impl std::str::FromStr for LinkMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(LinkMode::Full),
            "fast" => Ok(LinkMode::Fast),
            _ => Err(Error::param("sweep.mode", format!("unknown mode `{s}` (expected full or fast)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub t_grid: Vec<f64>,
    pub mcs_indices: Vec<u8>,
    pub runs: usize,
    pub mode: LinkMode,
}

/// `{0, 0.1, …, 1}`.
pub fn default_t_grid() -> Vec<f64> {
    (0..=10).map(|i| f64::from(i) / 10.0).collect()
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            t_grid: default_t_grid(),
            mcs_indices: (0..MCS_COUNT as u8).collect(),
            runs: 50,
            mode: LinkMode::Full,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t_grid.is_empty() {
            return Err(Error::param("sweep.t_grid", "empty grid"));
        }
        if self.t_grid.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(Error::param("sweep.t_grid", "values must lie in [0, 1]"));
        }
        if self.t_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("sweep.t_grid", "values must be strictly increasing"));
        }
        if self.mcs_indices.is_empty() {
            return Err(Error::param("sweep.mcs", "empty MCS set"));
        }
        if let Some(&bad) = self.mcs_indices.iter().find(|&&i| usize::from(i) >= MCS_COUNT) {
            return Err(Error::param("sweep.mcs", format!("invalid MCS index {bad}")));
        }
        if self.mcs_indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("sweep.mcs", "indices must be strictly increasing"));
        }
        if self.runs == 0 {
            return Err(Error::param("sweep.runs", "at least one run is required"));
        }
        Ok(())
    }

    /// All MCS triples in lexicographic order.
    pub fn triples(&self) -> Vec<[u8; 3]> {
        let m = &self.mcs_indices;
        m.iter()
            .flat_map(|&c| m.iter().flat_map(move |&a| m.iter().map(move |&b| [c, a, b])))
            .collect()
    }
}

/// Everything a trial needs besides the plan: channel statistics, power,
/// seeding and the link model.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub channel: ChannelConfig,
    pub p_total: f64,
    pub seed: u64,
    /// Fresh channel per run instead of one fixed realization.
    pub ensemble: bool,
    pub link: LinkOptions,
    /// Required for [`LinkMode::Fast`].
    pub thresholds: Option<Arc<ThresholdTable>>,
}

impl Scenario {
    pub fn new(channel: ChannelConfig, seed: u64) -> Self {
        Self {
            channel,
            p_total: 1.0,
            seed,
            ensemble: false,
            link: LinkOptions::default(),
            thresholds: None,
        }
    }

    pub fn with_thresholds(mut self, table: Arc<ThresholdTable>) -> Self {
        self.thresholds = Some(table);
        self
    }

    /// Channel used by run `run`.
    pub fn channel_for_run(&self, run: usize) -> Result<ChannelPair> {
        let seed = if self.ensemble {
            derive_seed(self.seed, &[CHANNEL_STREAM, run as u64])
        } else {
            derive_seed(self.seed, &[CHANNEL_STREAM])
        };
        scenario_channel(&self.channel, seed)
    }

    /// Seed of one trial. The MCS triple is deliberately not an input, so
    /// every triple at a given `t` sees the same noise and jitter.
    pub fn trial_seed(&self, t: f64, run: usize) -> u64 {
        derive_seed(self.seed, &[TRIAL_STREAM, t_key(t), run as u64])
    }

    pub fn trial(&self, plan: &StreamPlan, run: usize, mode: LinkMode) -> Result<TrialOutcome> {
        let pair = self.channel_for_run(run)?;
        let noise_var = self.channel.noise_variance(&pair, self.p_total);
        let seed = self.trial_seed(plan.split.t, run);
        match mode {
            LinkMode::Full => run_trial_with(&pair, plan, noise_var, seed, &self.link),
            LinkMode::Fast => {
                let table = self
                    .thresholds
                    .as_deref()
                    .ok_or_else(|| Error::Calibration("fast mode needs a threshold table".into()))?;
                run_trial_fast(&pair, plan, noise_var, table, seed)
            }
        }
    }

    /// `runs` trials of one plan, reduced to stream rates.
    pub fn evaluate(&self, plan: &StreamPlan, runs: usize, mode: LinkMode) -> Result<StreamRates> {
        let outcomes = (0..runs)
            .map(|r| self.trial(plan, r, mode))
            .collect::<Result<Vec<_>>>()?;
        empirical_stream_rates(&outcomes, plan)
    }
}

fn t_key(t: f64) -> u64 {
    (t * 1e6).round() as u64
}

/// Rates of one `(t, triple)` point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub t: f64,
    pub mcs: [u8; 3],
    pub rates: StreamRates,
}

/// Raw sweep results in `(t, triple)` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

/// Evaluates every `(t, triple)` point of the sweep.
pub fn sweep(scenario: &Scenario, cfg: &SweepConfig) -> Result<SweepTable> {
    cfg.validate()?;
    let triples = cfg.triples();
    let points: Vec<(f64, [u8; 3])> = cfg
        .t_grid
        .iter()
        .flat_map(|&t| triples.iter().map(move |&m| (t, m)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(t, mcs)| {
            let plan = StreamPlan::new(mcs, PowerSplit::new(t, scenario.p_total)?)?;
            let rates = scenario.evaluate(&plan, cfg.runs, cfg.mode)?;
            Ok(SweepRow { t, mcs, rates })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { rows })
}

/// Highest sum rate among rows; the first (lowest triple) wins ties.
fn best_row<'a>(rows: impl Iterator<Item = &'a SweepRow>) -> Option<&'a SweepRow> {
    rows.fold(None, |best: Option<&SweepRow>, row| match best {
        Some(b) if sum_rate(&row.rates) <= sum_rate(&b.rates) => Some(b),
        _ => Some(row),
    })
}

/// Brute-force search for the MCS triple with the highest sum rate at `t`.
pub fn best_mcs_at_t(t: f64, scenario: &Scenario, cfg: &SweepConfig) -> Result<(StreamPlan, StreamRates)> {
    let single = SweepConfig {
        t_grid: vec![t],
        ..cfg.clone()
    };
    let table = sweep(scenario, &single)?;
    let row = best_row(table.rows.iter()).expect("non-empty sweep");
    Ok((StreamPlan::new(row.mcs, PowerSplit::new(t, scenario.p_total)?)?, row.rates))
}

/// Best triple at one `t` and its region segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TRecord {
    pub t: f64,
    pub mcs: [u8; 3],
    pub rates: StreamRates,
    /// `α = 1` end of the segment (the MULP point).
    pub mulp: RatePoint,
    /// `α = 0` end of the segment.
    pub unicast: RatePoint,
}

impl TRecord {
    pub fn sum_rate(&self) -> f64 {
        sum_rate(&self.rates)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Landmarks {
    /// Peak multicast rate.
    pub a: RatePoint,
    /// Peak unicast rate without a common stream.
    pub b: RatePoint,
    /// MULP point at the sum-rate maximizing split.
    pub d: RatePoint,
    /// Purely unicast point at the sum-rate maximizing split.
    pub f: RatePoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRegion {
    pub per_t: Vec<TRecord>,
    /// RSMA boundary, increasing `r_uni`.
    pub hull: Vec<RatePoint>,
    /// MULP boundary, increasing `r_uni`.
    pub mulp_hull: Vec<RatePoint>,
    pub landmarks: Landmarks,
    pub t_star: f64,
}

impl RateRegion {
    /// Reduces a sweep to the best triple per `t` and the region geometry.
    pub fn from_sweep(table: &SweepTable) -> Result<Self> {
        let mut per_t: Vec<TRecord> = Vec::new();
        let mut start = 0;
        while start < table.rows.len() {
            let t = table.rows[start].t;
            let end = start + table.rows[start..].iter().take_while(|r| r.t == t).count();
            let row = best_row(table.rows[start..end].iter()).expect("non-empty group");
            per_t.push(TRecord {
                t,
                mcs: row.mcs,
                rates: row.rates,
                mulp: noum_split(&row.rates, MessageSplit::MULP),
                unicast: noum_split(&row.rates, MessageSplit::UNICAST),
            });
            start = end;
        }
        if per_t.is_empty() {
            return Err(Error::param("sweep.t_grid", "empty grid"));
        }
        let star = per_t
            .iter()
            .fold(&per_t[0], |b, r| if r.sum_rate() > b.sum_rate() { r } else { b });
        let first = &per_t[0];
        let last = &per_t[per_t.len() - 1];
        let landmarks = Landmarks {
            a: RatePoint::new(0.0, first.sum_rate()),
            b: RatePoint::new(last.sum_rate(), 0.0),
            d: star.mulp,
            f: RatePoint::new(star.sum_rate(), 0.0),
        };
        let endpoints: Vec<RatePoint> = per_t.iter().flat_map(|r| [r.mulp, r.unicast]).collect();
        let mulp_points: Vec<RatePoint> = per_t.iter().map(|r| mulp_point(&r.rates)).collect();
        Ok(Self {
            hull: time_sharing_boundary(&endpoints),
            mulp_hull: time_sharing_boundary(&mulp_points),
            t_star: star.t,
            landmarks,
            per_t,
        })
    }

    pub fn star(&self) -> &TRecord {
        self.per_t
            .iter()
            .find(|r| r.t == self.t_star)
            .expect("t_star is on the grid")
    }

    /// Point on the `t*` segment with multicast rate `r_0`, if reachable.
    pub fn landmark_e(&self, r_0: f64) -> Option<RatePoint> {
        let star = self.star();
        (r_0 >= 0.0 && r_0 <= star.rates.r_c).then(|| RatePoint::new(star.sum_rate() - r_0, r_0))
    }

    /// Largest common rate over the grid.
    pub fn peak_multicast(&self) -> f64 {
        self.per_t.iter().map(|r| r.rates.r_c).fold(0.0, f64::max)
    }

    /// `R0_GRID_POINTS` evenly spaced targets from 0 to the peak multicast rate.
    pub fn r0_grid(&self) -> Vec<f64> {
        let peak = self.peak_multicast();
        (0..R0_GRID_POINTS)
            .map(|i| match i {
                i if i == R0_GRID_POINTS - 1 => peak,
                i => peak * i as f64 / (R0_GRID_POINTS - 1) as f64,
            })
            .collect()
    }

    /// Area between the RSMA and MULP boundaries.
    pub fn hull_area_gap(&self) -> f64 {
        hull_area(&self.hull) - hull_area(&self.mulp_hull)
    }
}

/// Sweep followed by the region reduction.
pub fn build_region(scenario: &Scenario, cfg: &SweepConfig) -> Result<(RateRegion, SweepTable)> {
    let table = sweep(scenario, cfg)?;
    Ok((RateRegion::from_sweep(&table)?, table))
}

fn cross(o: &RatePoint, a: &RatePoint, b: &RatePoint) -> f64 {
    (a.r_uni - o.r_uni) * (b.r_mult - o.r_mult) - (a.r_mult - o.r_mult) * (b.r_uni - o.r_uni)
}

/// Pareto boundary of the convex hull of `points` together with the axes,
/// from `(0, max r_mult)` to `(max r_uni, 0)`.
pub fn time_sharing_boundary(points: &[RatePoint]) -> Vec<RatePoint> {
    let max_uni = points.iter().map(|p| p.r_uni).fold(0.0, f64::max);
    let max_mult = points.iter().map(|p| p.r_mult).fold(0.0, f64::max);
    let mut pts: Vec<RatePoint> = points.to_vec();
    pts.push(RatePoint::new(0.0, max_mult));
    pts.push(RatePoint::new(max_uni, 0.0));
    pts.sort_by(|a, b| a.r_uni.total_cmp(&b.r_uni).then(b.r_mult.total_cmp(&a.r_mult)));
    pts.dedup();
    let scale = (max_uni.max(max_mult)).max(f64::MIN_POSITIVE);
    let eps = 1e-12 * scale * scale;
    let mut hull: Vec<RatePoint> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &p) >= -eps {
            hull.pop();
        }
        hull.push(p);
    }
    hull
}

/// Area under a boundary sorted by increasing `r_uni`.
pub fn hull_area(boundary: &[RatePoint]) -> f64 {
    boundary
        .windows(2)
        .map(|w| (w[1].r_uni - w[0].r_uni) * (w[0].r_mult + w[1].r_mult) / 2.0)
        .sum()
}

/// Unicast sum rates of both schemes at one multicast target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominanceRecord {
    pub r_0: f64,
    /// Best grid split whose common rate carries `r_0`; `None` if infeasible.
    pub mulp_t: Option<f64>,
    pub mulp_uni: Option<f64>,
    pub rsma_uni: Option<f64>,
    /// Standard errors of the two unicast rates.
    pub mulp_se: f64,
    pub rsma_se: f64,
    pub rsma_dominates: Option<bool>,
}

impl DominanceRecord {
    /// Two standard errors of the difference.
    pub fn tolerance(&self) -> f64 {
        2.0 * (self.mulp_se.powi(2) + self.rsma_se.powi(2)).sqrt()
    }

    /// `rsma_uni ≥ mulp_uni − tolerance`, `None` when infeasible.
    pub fn holds_within_tolerance(&self) -> Option<bool> {
        Some(self.rsma_uni? >= self.mulp_uni? - self.tolerance())
    }
}

fn rss(values: &[f64]) -> f64 {
    values.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Compares RSMA (common stream topped up with unicast data at `t*`) with
/// MULP (best split whose common rate still carries `r_0`).
pub fn dominance_check(region: &RateRegion, r_0: f64) -> DominanceRecord {
    let feasible = region
        .per_t
        .iter()
        .filter(|r| r.rates.r_c >= r_0)
        .fold(None, |best: Option<&TRecord>, r| match best {
            Some(b) if r.rates.private_sum() <= b.rates.private_sum() => Some(b),
            _ => Some(r),
        });
    let Some(mulp) = feasible.filter(|_| r_0 >= 0.0) else {
        return DominanceRecord {
            r_0,
            mulp_t: None,
            mulp_uni: None,
            rsma_uni: None,
            mulp_se: 0.0,
            rsma_se: 0.0,
            rsma_dominates: None,
        };
    };
    let mulp_uni = mulp.rates.private_sum();
    let mulp_se = rss(&mulp.rates.std_errors[1..]);
    let star = region.star();
    let (rsma_uni, rsma_se) = if r_0 <= star.rates.r_c {
        (star.sum_rate() - r_0, rss(&star.rates.std_errors))
    } else {
        (mulp_uni, mulp_se)
    };
    DominanceRecord {
        r_0,
        mulp_t: Some(mulp.t),
        mulp_uni: Some(mulp_uni),
        rsma_uni: Some(rsma_uni),
        mulp_se,
        rsma_se,
        rsma_dominates: Some(rsma_uni >= mulp_uni - ROUNDING_TOL * mulp_uni.max(1.0)),
    }
}

/// Dominance table over the region's multicast target grid.
pub fn dominance_table(region: &RateRegion) -> Vec<DominanceRecord> {
    region.r0_grid().into_iter().map(|r| dominance_check(region, r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> RatePoint {
        RatePoint::new(x, y)
    }

    #[test]
    fn single_point_boundary() {
        assert_eq!(time_sharing_boundary(&[p(2.0, 1.0)]), vec![p(0.0, 1.0), p(2.0, 1.0), p(2.0, 0.0)]);
    }

    #[test]
    fn collinear_points_are_dropped() {
        let b = time_sharing_boundary(&[p(0.0, 3.0), p(1.0, 2.0), p(2.0, 1.0), p(3.0, 0.0)]);
        assert_eq!(b, vec![p(0.0, 3.0), p(3.0, 0.0)]);
        assert!((hull_area(&b) - 4.5).abs() < 1e-15);
    }

    #[test]
    fn sweep_config_validation() {
        assert!(SweepConfig::default().validate().is_ok());
        let bad = SweepConfig {
            t_grid: vec![0.5, 0.2],
            ..SweepConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SweepConfig {
            runs: 0,
            ..SweepConfig::default()
        };
        assert!(bad.validate().is_err());
        assert!(SweepConfig::default().triples().len() == 1000);
        assert_eq!(SweepConfig::default().triples()[1], [0, 0, 1]);
    }
}
