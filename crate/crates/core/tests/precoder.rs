use noum::channel::{generate_channel_pair, scenario_channel, ChannelConfig, ChannelPair};
use noum::linalg::{inner, norm_sqr, CVec2};
use noum::precoder::{common_precoder, effective_gains, precoder_set, private_precoders, PowerSplit};
use num_complex::Complex64;
use proptest::prelude::*;

fn pair(rho: f64, delta: f64, seed: u64) -> ChannelPair {
    let cfg = ChannelConfig { rho, pathloss_delta_db: delta, csit_error_var: 0.0, ..ChannelConfig::default() };
    generate_channel_pair(&cfg, seed).unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn orthogonal_users_closed_form() {
    let e1: CVec2 = [c(1.0, 0.0), c(0.0, 0.0)];
    let e2: CVec2 = [c(0.0, 0.0), c(1.0, 0.0)];
    let split = PowerSplit::new(0.5, 1.0).unwrap();
    let pc = common_precoder(&e1, &e2, split).unwrap();
    assert!((pc[0] - c(0.5, 0.0)).norm() < 1e-12 && (pc[1] - c(0.5, 0.0)).norm() < 1e-12);
    let (p1, p2) = private_precoders(&e1, &e2, split).unwrap();
    assert!((inner(&e2, &p1)).norm() < 1e-12 && (inner(&e1, &p2)).norm() < 1e-12);
    assert!((norm_sqr(&p1) - 0.25).abs() < 1e-12 && (norm_sqr(&p2) - 0.25).abs() < 1e-12);
    assert!((norm_sqr(&pc) - 0.5).abs() < 1e-12);
}

#[test]
fn endpoints_drop_streams() {
    let p = pair(0.7, 0.0, 3);
    let multicast = precoder_set(&p, PowerSplit::new(0.0, 1.0).unwrap()).unwrap();
    assert_eq!(norm_sqr(&multicast.p_1) + norm_sqr(&multicast.p_2), 0.0);
    let unicast = precoder_set(&p, PowerSplit::new(1.0, 1.0).unwrap()).unwrap();
    assert_eq!(norm_sqr(&unicast.p_c), 0.0);
}

#[test]
fn rejects_degenerate_inputs() {
    let zero: CVec2 = [c(0.0, 0.0), c(0.0, 0.0)];
    let e1: CVec2 = [c(1.0, 0.0), c(0.0, 0.0)];
    let split = PowerSplit::new(0.5, 1.0).unwrap();
    assert!(common_precoder(&zero, &e1, split).is_err());
    assert!(private_precoders(&e1, &zero, split).is_err());
    let anti: CVec2 = [c(-1.0, 0.0), c(0.0, 0.0)];
    assert!(common_precoder(&e1, &anti, split).is_err());
    assert!(PowerSplit::new(1.5, 1.0).is_err());
    assert!(PowerSplit::new(0.5, 0.0).is_err());
}

#[test]
fn imperfect_csit_leaks_private_power() {
    let cfg = ChannelConfig { rho: 0.7, csit_error_var: 0.05, ..ChannelConfig::default() };
    let p = scenario_channel(&cfg, 12).unwrap();
    let pre = precoder_set(&p, PowerSplit::new(0.6, 1.0).unwrap()).unwrap();
    let g = effective_gains(&p, &pre);
    assert!(g[0][2] > 0.0 && g[1][1] > 0.0, "{g:?}");
}

proptest! {
    #[test]
    fn total_power_is_conserved(rho in 0.0f64..0.99, t in 0.0f64..=1.0, p_total in 0.1f64..10.0, seed in any::<u64>()) {
        let p = pair(rho, 0.0, seed);
        let pre = precoder_set(&p, PowerSplit::new(t, p_total).unwrap()).unwrap();
        prop_assert!((pre.total_power() - p_total).abs() < 1e-9 * p_total);
    }

    #[test]
    fn zero_forcing_nulls_the_other_user(rho in 0.0f64..0.99, delta in 0.0f64..10.0, t in 0.01f64..=1.0, seed in any::<u64>()) {
        let p = pair(rho, delta, seed);
        let pre = precoder_set(&p, PowerSplit::new(t, 1.0).unwrap()).unwrap();
        let g = effective_gains(&p, &pre);
        let scale = norm_sqr(&p.h1) + norm_sqr(&p.h2);
        prop_assert!(g[0][2] < 1e-18 * scale.max(1.0) + 1e-20);
        prop_assert!(g[1][1] < 1e-18 * scale.max(1.0) + 1e-20);
    }

    #[test]
    fn directions_ignore_estimate_scaling(rho in 0.0f64..0.99, t in 0.0f64..=1.0, a in 0.1f64..10.0, b in 0.1f64..10.0, seed in any::<u64>()) {
        let p = pair(rho, 0.0, seed);
        let split = PowerSplit::new(t, 1.0).unwrap();
        let sa = |h: &CVec2, s: f64| -> CVec2 { [h[0] * s, h[1] * s] };
        let base = (common_precoder(&p.h1_hat, &p.h2_hat, split).unwrap(), private_precoders(&p.h1_hat, &p.h2_hat, split).unwrap());
        let (h1s, h2s) = (sa(&p.h1_hat, a), sa(&p.h2_hat, b));
        let scaled = (common_precoder(&h1s, &h2s, split).unwrap(), private_precoders(&h1s, &h2s, split).unwrap());
        let same = |x: &CVec2, y: &CVec2| (x[0] - y[0]).norm() < 1e-9 && (x[1] - y[1]).norm() < 1e-9;
        prop_assert!(same(&base.0, &scaled.0));
        prop_assert!(same(&base.1 .0, &scaled.1 .0));
        prop_assert!(same(&base.1 .1, &scaled.1 .1));
    }
}
