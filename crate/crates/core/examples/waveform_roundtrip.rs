//! Sends one frame per MCS through polar coding, QAM and OFDM over an AWGN
//! channel and reports whether it decodes.
//!
//! ```text
//! cargo run --release --example waveform_roundtrip -- [snr_db]
//! ```

use noum::waveform::{ofdm_assemble, ofdm_extract, FrameConfig, McsLevel, StreamCodec, DEFAULT_PILOTS};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let snr_db: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(12.0);
    let frame = FrameConfig::default();
    let noise_var = 10f64.powf(-snr_db / 10.0);
    let normal = Normal::new(0.0, (noise_var / 2.0).sqrt())?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    println!("SNR {snr_db} dB, {} samples per frame", frame.total_samples());
    for mcs in McsLevel::all() {
        let codec = StreamCodec::new(mcs, &frame)?;
        let payload = codec.random_payload(&mut rng);
        let tx = ofdm_assemble(&codec.modulate(&payload)?, &frame, &DEFAULT_PILOTS)?;
        let rx: Vec<Complex64> = tx
            .iter()
            .map(|s| s + Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng)))
            .collect();
        let decoded = codec.decode(&ofdm_extract(&rx, &frame)?, noise_var)?;
        println!(
            "mcs {} {:<7} k = {:5}  n = {:5}  crc {}  payload {}",
            mcs.index,
            mcs.label(),
            codec.payload_len(),
            codec.coded_len(),
            if decoded.success { "pass" } else { "fail" },
            if decoded.bits == payload { "ok" } else { "wrong" }
        );
    }
    Ok(())
}
