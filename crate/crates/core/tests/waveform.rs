use noum::waveform::ofdm::ofdm_extract_pilots;
use noum::waveform::polar::polar_transform;
use noum::waveform::qam::constellation_points;
use noum::waveform::{
    mcs_params, ofdm_assemble, ofdm_extract, polar_decode, polar_encode, qam_demodulate_llr, qam_modulate,
    FrameConfig, McsLevel, PolarCode, StreamCodec, DEFAULT_PILOTS,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODULATION_ORDERS: [u8; 5] = [1, 2, 4, 6, 8];

fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.gen_range(0..=1u8)).collect()
}

#[test]
fn mcs_table_rows() {
    let five = mcs_params(5).unwrap();
    assert_eq!((five.label(), five.m, five.rate_num, five.rate_den), ("16QAM", 4, 3, 4));
    assert_eq!(five.max_data_rate_mbps(), 36.0);
    let zero = mcs_params(0).unwrap();
    assert_eq!((zero.label(), zero.m, zero.code_rate()), ("BPSK", 1, 0.5));
    assert_eq!(zero.max_data_rate_mbps(), 6.0);
    assert!(mcs_params(10).is_err());
    let peaks: Vec<f64> = McsLevel::all().map(|m| m.max_data_rate_mbps()).collect();
    assert_eq!(peaks, vec![6.0, 9.0, 12.0, 18.0, 24.0, 36.0, 48.0, 54.0, 72.0, 80.0]);
}

/// Rows of `F^{⊗4}` in natural order have weight `2^popcount(i)`, so the
/// minimum distance of a polar code is the smallest such weight over its
/// information set.
#[test]
fn toy_code_minimum_distance_matches_row_weights() {
    let code = PolarCode::new(16, 4, false, 0.0).unwrap();
    let expected = code
        .info_positions()
        .iter()
        .map(|&i| 1usize << (i as u32).count_ones())
        .min()
        .unwrap();
    let words: Vec<Vec<u8>> = (0u8..16)
        .map(|w| code.encode(&(0..4).map(|b| (w >> b) & 1).collect::<Vec<_>>()).unwrap())
        .collect();
    assert!(words[0].iter().all(|&b| b == 0), "zero word must map to zero");
    let d_min = words[1..]
        .iter()
        .map(|c| c.iter().filter(|&&b| b == 1).count())
        .min()
        .unwrap();
    assert_eq!(d_min, expected);
    for w in 0..16usize {
        for flip in 0..4 {
            let other = w ^ (1 << flip);
            let dist = words[w].iter().zip(&words[other]).filter(|(a, b)| a != b).count();
            assert!(dist >= d_min, "{w} vs {other}: {dist} < {d_min}");
        }
    }
}

#[test]
fn polar_transform_is_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let a = random_bits(&mut rng, 256);
    let b = random_bits(&mut rng, 256);
    let mut sum: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
    let (mut ta, mut tb) = (a.clone(), b.clone());
    polar_transform(&mut ta);
    polar_transform(&mut tb);
    polar_transform(&mut sum);
    let expect: Vec<u8> = ta.iter().zip(&tb).map(|(x, y)| x ^ y).collect();
    assert_eq!(sum, expect);
}

#[test]
fn zero_noise_end_to_end_all_mcs() {
    let frame = FrameConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for mcs in McsLevel::all() {
        let codec = StreamCodec::new(mcs, &frame).unwrap();
        let payload = codec.random_payload(&mut rng);
        let samples = ofdm_assemble(&codec.modulate(&payload).unwrap(), &frame, &DEFAULT_PILOTS).unwrap();
        let data = ofdm_extract(&samples, &frame).unwrap();
        let decoded = codec.decode(&data, 1e-6).unwrap();
        assert!(decoded.success, "MCS {}", mcs.index);
        assert_eq!(decoded.bits, payload, "MCS {}", mcs.index);
    }
}

#[test]
fn free_function_codec_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let info = random_bits(&mut rng, 500);
    let cw = polar_encode(&info, 1200, 500).unwrap();
    let llrs: Vec<f64> = cw.iter().map(|&b| if b == 0 { 8.0 } else { -8.0 }).collect();
    let dec = polar_decode(&llrs, 1200, 500).unwrap();
    assert!(dec.success);
    assert_eq!(dec.bits, info);
}

#[test]
fn pure_erasure_fails() {
    let frame = FrameConfig::default();
    let codec = StreamCodec::new(mcs_params(0).unwrap(), &frame).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let zeros = vec![Complex64::new(0.0, 0.0); codec.coded_len()];
    let trials = 1000;
    let failures = (0..trials)
        .filter(|_| {
            let payload = codec.random_payload(&mut rng);
            let dec = codec.decode(&zeros, 1.0).unwrap();
            !dec.success || dec.bits != payload
        })
        .count();
    assert!(failures as f64 / trials as f64 > 0.99, "{failures}/{trials}");
}

#[test]
fn constellations_have_unit_energy() {
    for m in MODULATION_ORDERS {
        let pts = constellation_points(m).unwrap();
        assert_eq!(pts.len(), 1 << m);
        let energy = pts.iter().map(|p| p.norm_sqr()).sum::<f64>() / pts.len() as f64;
        assert!((energy - 1.0).abs() < 1e-12, "m = {m}: {energy}");
    }
}

#[test]
fn bpsk_llr_closed_form() {
    let ys = [Complex64::new(0.3, -0.2), Complex64::new(-1.7, 0.9), Complex64::new(0.0, 4.0)];
    for var in [0.05, 0.5, 2.0] {
        let llr = qam_demodulate_llr(&ys, 1, var).unwrap();
        for (l, y) in llr.iter().zip(&ys) {
            assert!((l - 4.0 * y.re / var).abs() < 1e-12);
        }
    }
}

#[test]
fn ofdm_frame_length() {
    let frame = FrameConfig::default();
    let data = vec![Complex64::new(1.0, 0.0); frame.data_symbols()];
    assert_eq!(ofdm_assemble(&data, &frame, &DEFAULT_PILOTS).unwrap().len(), 4000);
}

#[test]
fn pilots_survive_the_roundtrip() {
    let frame = FrameConfig::default();
    let data = vec![Complex64::new(0.0, 0.0); frame.data_symbols()];
    let samples = ofdm_assemble(&data, &frame, &DEFAULT_PILOTS).unwrap();
    for p in ofdm_extract_pilots(&samples, &frame).unwrap() {
        for (a, b) in p.iter().zip(&DEFAULT_PILOTS) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}

fn m_strategy() -> impl Strategy<Value = u8> {
    prop::sample::select(MODULATION_ORDERS.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qam_hard_decisions_invert_the_mapping(m in m_strategy(), seed in any::<u64>(), symbols in 1usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits = random_bits(&mut rng, symbols * usize::from(m));
        let syms = qam_modulate(&bits, m).unwrap();
        let llr = qam_demodulate_llr(&syms, m, 1e-9).unwrap();
        let hard: Vec<u8> = llr.iter().map(|&l| u8::from(l < 0.0)).collect();
        prop_assert_eq!(hard, bits);
    }

    #[test]
    fn ofdm_roundtrip_and_parseval(seed in any::<u64>(), payload_symbols in 1usize..6) {
        let frame = FrameConfig { payload_symbols, ..FrameConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<Complex64> = (0..frame.data_symbols())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let pilots: [Complex64; 4] = std::array::from_fn(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
        let samples = ofdm_assemble(&data, &frame, &pilots).unwrap();
        let back = ofdm_extract(&samples, &frame).unwrap();
        for (a, b) in back.iter().zip(&data) {
            prop_assert!((a - b).norm() < 1e-9);
        }
        // Per symbol: useful-part energy equals the energy on the 52
        // occupied subcarriers.
        for (k, sym) in samples.chunks(frame.samples_per_symbol()).enumerate() {
            let time: f64 = sym[frame.cp_len..].iter().map(|s| s.norm_sqr()).sum();
            let freq: f64 = data[k * 48..(k + 1) * 48].iter().map(|s| s.norm_sqr()).sum::<f64>()
                + pilots.iter().map(|p| p.norm_sqr()).sum::<f64>();
            let mean_time = time / 64.0;
            let mean_occupied = freq / 52.0;
            prop_assert!((mean_time - mean_occupied * frame.occupied_fraction()).abs() < 1e-9);
        }
    }

    #[test]
    fn cyclic_delay_is_a_phase_ramp(seed in any::<u64>(), delay in 1usize..16) {
        let frame = FrameConfig { payload_symbols: 1, ..FrameConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<Complex64> = (0..48)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let samples = ofdm_assemble(&data, &frame, &DEFAULT_PILOTS).unwrap();
        // Receiver window moved `delay` samples earlier, still inside the CP.
        let mut shifted = vec![Complex64::new(0.0, 0.0); delay];
        shifted.extend_from_slice(&samples[..samples.len() - delay]);
        let back = ofdm_extract(&shifted, &frame).unwrap();
        let carriers: Vec<i32> = (-26..=26).filter(|c| *c != 0 && ![-21, -7, 7, 21].contains(c)).collect();
        for ((a, b), c) in back.iter().zip(&data).zip(&carriers) {
            let ramp = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * f64::from(*c) * delay as f64 / 64.0);
            prop_assert!((a - b * ramp).norm() < 1e-9);
        }
    }
}
