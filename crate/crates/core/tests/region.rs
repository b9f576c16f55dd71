use std::sync::Arc;

use noum::channel::ChannelConfig;
use noum::experiment::bundled_thresholds;
use noum::rates::{RatePoint, StreamRates};
use noum::region::{
    build_region, hull_area, dominance_check, dominance_table, sweep, time_sharing_boundary, LinkMode, RateRegion,
    Scenario, SweepConfig, SweepRow, SweepTable,
};
use proptest::prelude::*;

fn rates(r_c: f64, r_1: f64, r_2: f64) -> StreamRates {
    StreamRates { r_c, r_1, r_2, ..StreamRates::ZERO }
}

fn table(per_t: &[(f64, f64, f64)]) -> SweepTable {
    let n = per_t.len();
    SweepTable {
        rows: per_t
            .iter()
            .enumerate()
            .map(|(i, &(c, a, b))| SweepRow {
                t: if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 },
                mcs: [0, 0, 0],
                rates: rates(c, a, b),
            })
            .collect(),
    }
}

/// Height of a boundary (sorted by `r_uni`) at abscissa `x`.
fn height(boundary: &[RatePoint], x: f64) -> f64 {
    for w in boundary.windows(2) {
        if x >= w[0].r_uni && x <= w[1].r_uni {
            let span = w[1].r_uni - w[0].r_uni;
            if span == 0.0 {
                return w[0].r_mult.max(w[1].r_mult);
            }
            return w[0].r_mult + (w[1].r_mult - w[0].r_mult) * (x - w[0].r_uni) / span;
        }
    }
    0.0
}

fn fast_scenario(rho: f64, snr_db: f64) -> Scenario {
    let channel = ChannelConfig { rho, snr_db, csit_error_var: 0.0, ..ChannelConfig::default() };
    Scenario::new(channel, 99).with_thresholds(Arc::new(bundled_thresholds().unwrap()))
}

fn fast_sweep(t_grid: Vec<f64>, mcs: Vec<u8>, runs: usize) -> SweepConfig {
    SweepConfig { t_grid, mcs_indices: mcs, runs, mode: LinkMode::Fast }
}

#[test]
fn landmark_geometry_on_a_known_table() {
    // Sum rates 1, 2.5, 3, 2: the split at t = 2/3 maximizes the sum.
    let region = RateRegion::from_sweep(&table(&[(1.0, 0.0, 0.0), (1.5, 0.5, 0.5), (1.0, 1.0, 1.0), (0.0, 1.0, 1.0)]))
        .unwrap();
    assert!((region.t_star - 2.0 / 3.0).abs() < 1e-12);
    let l = region.landmarks;
    assert_eq!((l.a.r_uni, l.a.r_mult), (0.0, 1.0));
    assert_eq!((l.b.r_uni, l.b.r_mult), (2.0, 0.0));
    assert_eq!((l.d.r_uni, l.d.r_mult), (2.0, 1.0));
    assert_eq!((l.f.r_uni, l.f.r_mult), (3.0, 0.0));
    let e = region.landmark_e(0.5).unwrap();
    assert_eq!((e.r_uni, e.r_mult), (2.5, 0.5));
    assert!(region.landmark_e(1.5).is_none());
    // D and F bound a slope −1 segment.
    assert!(((l.f.r_uni - l.d.r_uni) - (l.d.r_mult - l.f.r_mult)).abs() < 1e-12);
}

#[test]
fn ties_pick_the_lowest_t() {
    let region = RateRegion::from_sweep(&table(&[(2.0, 0.0, 0.0), (1.0, 0.5, 0.5), (0.0, 1.0, 1.0)])).unwrap();
    assert_eq!(region.t_star, 0.0);
}

#[test]
fn unicast_optimum_makes_both_schemes_equal() {
    // Sum rate peaks at t = 1 where there is no common stream.
    let region = RateRegion::from_sweep(&table(&[(1.0, 0.0, 0.0), (0.5, 0.5, 0.5), (0.0, 1.5, 1.5)])).unwrap();
    assert_eq!(region.t_star, 1.0);
    let rec = dominance_check(&region, 0.0);
    assert_eq!(rec.rsma_uni, rec.mulp_uni);
    assert_eq!(rec.rsma_uni, Some(3.0));
}

#[test]
fn infeasible_targets_have_no_verdict() {
    let region = RateRegion::from_sweep(&table(&[(1.0, 0.0, 0.0), (0.0, 1.0, 1.0)])).unwrap();
    let rec = dominance_check(&region, 1.5);
    assert_eq!(rec.rsma_dominates, None);
    assert_eq!(rec.holds_within_tolerance(), None);
}

#[test]
fn orthogonal_users_at_high_snr() {
    // rho = 0 and 60 dB: every stream decodes at the top MCS, so the
    // endpoints are two full private streams or one full common stream.
    let scenario = fast_scenario(0.0, 60.0);
    let cfg = fast_sweep(vec![0.0, 1.0], vec![0, 9], 20);
    let (region, _) = build_region(&scenario, &cfg).unwrap();
    let top = 20.0 / 3.0;
    let t0 = &region.per_t[0];
    let t1 = &region.per_t[1];
    assert!((t0.rates.r_c - top).abs() < 1e-12 && t0.rates.private_sum() == 0.0);
    assert!(t1.rates.r_c == 0.0 && (t1.rates.private_sum() - 2.0 * top).abs() < 1e-12);
    assert_eq!(region.t_star, 1.0);
}

#[test]
fn sweeps_are_reproducible_and_ordered() {
    let scenario = fast_scenario(0.7, 20.0);
    let cfg = fast_sweep(vec![0.0, 0.5, 1.0], vec![0, 3, 6], 30);
    let a = sweep(&scenario, &cfg).unwrap();
    let b = sweep(&scenario, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.rows.len(), 3 * 27);
    let keys: Vec<(f64, [u8; 3])> = a.rows.iter().map(|r| (r.t, r.mcs)).collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    assert_eq!(keys, sorted);
}

#[test]
fn invalid_sweeps_are_rejected() {
    let scenario = fast_scenario(0.7, 20.0);
    assert!(sweep(&scenario, &fast_sweep(vec![], vec![0], 10)).is_err());
    assert!(sweep(&scenario, &fast_sweep(vec![1.2], vec![0], 10)).is_err());
    assert!(sweep(&scenario, &fast_sweep(vec![0.5], vec![12], 10)).is_err());
    assert!(sweep(&scenario, &fast_sweep(vec![0.5], vec![0], 0)).is_err());
    let no_table = Scenario::new(ChannelConfig::default(), 1);
    assert!(sweep(&no_table, &fast_sweep(vec![0.5], vec![0], 1)).is_err());
}

fn rate_triple() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.0f64..7.0, 0.0f64..7.0, 0.0f64..7.0)
}

proptest! {
    #[test]
    fn boundary_is_concave_and_dominates(points in prop::collection::vec((0.0f64..10.0, 0.0f64..10.0), 1..30)) {
        let pts: Vec<RatePoint> = points.iter().map(|&(u, m)| RatePoint::new(u, m)).collect();
        let hull = time_sharing_boundary(&pts);
        prop_assert_eq!(hull[0].r_uni, 0.0);
        prop_assert_eq!(hull[hull.len() - 1].r_mult, 0.0);
        for w in hull.windows(2) {
            prop_assert!(w[1].r_uni >= w[0].r_uni && w[1].r_mult <= w[0].r_mult);
            prop_assert!(w[1] != w[0]);
        }
        for w in hull.windows(3).filter(|w| w[0].r_uni < w[1].r_uni && w[1].r_uni < w[2].r_uni) {
            let s0 = (w[1].r_mult - w[0].r_mult) / (w[1].r_uni - w[0].r_uni);
            let s1 = (w[2].r_mult - w[1].r_mult) / (w[2].r_uni - w[1].r_uni);
            prop_assert!(s1 < s0 + 1e-9);
        }
        for p in &pts {
            prop_assert!(height(&hull, p.r_uni) >= p.r_mult - 1e-9);
        }
    }

    #[test]
    fn rsma_region_contains_mulp(per_t in prop::collection::vec(rate_triple(), 2..12)) {
        let region = RateRegion::from_sweep(&table(&per_t)).unwrap();
        prop_assert!(region.hull_area_gap() >= -1e-9);
        prop_assert!(hull_area(&region.hull) >= hull_area(&region.mulp_hull) - 1e-9);
        for p in &region.mulp_hull {
            prop_assert!(height(&region.hull, p.r_uni) >= p.r_mult - 1e-9);
        }
        for r in &region.per_t {
            // Each segment runs at slope −1 between its two endpoints.
            let du = r.unicast.r_uni - r.mulp.r_uni;
            let dm = r.mulp.r_mult - r.unicast.r_mult;
            prop_assert!((du - dm).abs() < 1e-12);
        }
    }

    #[test]
    fn rsma_never_loses_on_the_target_grid(per_t in prop::collection::vec(rate_triple(), 2..12)) {
        let region = RateRegion::from_sweep(&table(&per_t)).unwrap();
        for rec in dominance_table(&region) {
            prop_assert_eq!(rec.rsma_dominates, Some(true));
        }
        let at_zero = dominance_check(&region, 0.0);
        prop_assert!(at_zero.rsma_uni.unwrap() >= at_zero.mulp_uni.unwrap());
    }
}
