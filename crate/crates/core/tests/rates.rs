use noum::link::{StreamPlan, TrialOutcome};
use noum::precoder::PowerSplit;
use noum::rates::{empirical_stream_rates, mulp_point, noum_split, sum_rate, MessageSplit, StreamRates};
use proptest::prelude::*;

fn outcome(bits: u8) -> TrialOutcome {
    TrialOutcome {
        common_ok_u1: bits & 1 != 0,
        common_ok_u2: bits & 2 != 0,
        private_ok_u1: bits & 4 != 0,
        private_ok_u2: bits & 8 != 0,
        sinr_common: [0.0; 2],
        sinr_private: [0.0; 2],
    }
}

fn rates_from(flags: &[u8], mcs: [u8; 3]) -> StreamRates {
    let plan = StreamPlan::new(mcs, PowerSplit::new(0.5, 1.0).unwrap()).unwrap();
    let outcomes: Vec<TrialOutcome> = flags.iter().map(|&b| outcome(b)).collect();
    empirical_stream_rates(&outcomes, &plan).unwrap()
}

/// Bits per symbol times code rate, written out from the MCS table.
const SPECTRAL_EFFICIENCY: [f64; 10] = [0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 4.5, 6.0, 20.0 / 3.0];

#[test]
fn all_decoded_gives_spectral_efficiencies() {
    let r = rates_from(&[15; 10], [0, 4, 9]);
    assert_eq!((r.r_c, r.r_1, r.r_2), (0.5, 2.0, SPECTRAL_EFFICIENCY[9]));
    assert_eq!(r.std_errors, [0.0; 3]);
    let mbps = r.sum_mbps();
    assert!((mbps - (6.0 + 24.0 + 80.0)).abs() < 1e-9);
}

#[test]
fn common_needs_both_users() {
    let r = rates_from(&[1, 2, 3, 3], [2, 2, 2]);
    assert_eq!(r.success_probs[0], 0.5);
    assert_eq!(r.r_c, 0.5);
}

#[test]
fn empty_outcomes_are_rejected() {
    let plan = StreamPlan::new([0, 0, 0], PowerSplit::new(0.5, 1.0).unwrap()).unwrap();
    assert!(empirical_stream_rates(&[], &plan).is_err());
    assert!(MessageSplit::new(1.1).is_err());
}

fn flags_strategy() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..16, 1..200)
}

fn mcs_strategy() -> impl Strategy<Value = [u8; 3]> {
    [0u8..10, 0u8..10, 0u8..10]
}

proptest! {
    #[test]
    fn rates_match_a_counting_oracle(flags in flags_strategy(), mcs in mcs_strategy()) {
        let r = rates_from(&flags, mcs);
        let n = flags.len() as f64;
        let count = |mask: u8| flags.iter().filter(|&&b| b & mask == mask).count() as f64 / n;
        let se = mcs.map(|m| SPECTRAL_EFFICIENCY[usize::from(m)]);
        prop_assert!((r.r_c - se[0] * count(3)).abs() < 1e-12);
        prop_assert!((r.r_1 - se[1] * count(4)).abs() < 1e-12);
        prop_assert!((r.r_2 - se[2] * count(8)).abs() < 1e-12);
        for x in 0..3 {
            let p = r.success_probs[x];
            prop_assert!((r.std_errors[x] - se[x] * (p * (1.0 - p) / n).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn split_conserves_the_sum(flags in flags_strategy(), mcs in mcs_strategy(), alpha in 0.0f64..=1.0) {
        let r = rates_from(&flags, mcs);
        let point = noum_split(&r, MessageSplit::new(alpha).unwrap());
        prop_assert!((point.r_uni + point.r_mult - sum_rate(&r)).abs() < 1e-12);
        prop_assert!(point.r_uni >= 0.0 && point.r_mult >= 0.0);
    }

    #[test]
    fn split_is_monotone_in_alpha(flags in flags_strategy(), mcs in mcs_strategy(), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let r = rates_from(&flags, mcs);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let p_lo = noum_split(&r, MessageSplit::new(lo).unwrap());
        let p_hi = noum_split(&r, MessageSplit::new(hi).unwrap());
        prop_assert!(p_hi.r_mult >= p_lo.r_mult);
        prop_assert!(p_hi.r_uni <= p_lo.r_uni + 1e-15);
    }

    #[test]
    fn full_multicast_split_is_the_mulp_point(flags in flags_strategy(), mcs in mcs_strategy()) {
        let r = rates_from(&flags, mcs);
        let a = noum_split(&r, MessageSplit::MULP);
        let b = mulp_point(&r);
        prop_assert_eq!(a.r_uni.to_bits(), b.r_uni.to_bits());
        prop_assert_eq!(a.r_mult.to_bits(), b.r_mult.to_bits());
        let u = noum_split(&r, MessageSplit::UNICAST);
        prop_assert_eq!(u.r_mult, 0.0);
    }
}
