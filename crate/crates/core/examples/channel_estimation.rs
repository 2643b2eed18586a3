//! Pilot estimation in the affine plane under a delay-Doppler channel, and
//! on the clean pilot comb under a delay-only channel.

use afdm_rsma::channel::{apply_channel, snr_to_noise_var, ChannelSpec, ChannelTap};
use afdm_rsma::framing::{Approach, FrameConfig, FramePayload, Framer};
use afdm_rsma::receiver::{estimate_channel_affine, estimate_channel_freq};
use afdm_rsma::seed::Seed;
use afdm_rsma::transforms::AffineParams;
use num_complex::Complex64;

fn payload(cfg: &FrameConfig) -> FramePayload {
    FramePayload {
        common_bits: (0..cfg.common_bits_per_frame())
            .map(|i| (i % 7 < 3) as u8)
            .collect(),
        private_bits: (0..cfg.private_bits_per_frame())
            .map(|i| (i % 5 < 2) as u8)
            .collect(),
    }
}

fn main() -> afdm_rsma::Result<()> {
    let taps = vec![
        ChannelTap::new(Complex64::new(0.8, 0.1), 0, 0),
        ChannelTap::new(Complex64::new(-0.3, 0.4), 1, 2),
        ChannelTap::new(Complex64::new(0.2, 0.0), 2, 1),
    ];
    let cfg = FrameConfig::new(
        AffineParams::new(256, 32, 0.0)?,
        Approach::PilotAndData,
        2,
        2,
    );
    let framer = Framer::new(cfg.clone())?;
    let tx = framer.build_frame(&payload(&cfg))?;
    for snr in [10.0, 20.0, 30.0] {
        let spec = ChannelSpec::new(taps.clone(), snr_to_noise_var(snr, &cfg), false)?;
        let y = apply_channel(&tx.samples, cfg.cp_len, &spec, Seed(3))?;
        let planes = framer.extract_received_planes(&y)?;
        let est = estimate_channel_affine(&planes.affine, &framer, true, 3.0)?.with_truth(&spec);
        println!(
            "affine estimate at {snr} dB, tap NMSE {:.2e}:",
            est.nmse.unwrap()
        );
        for t in &est.taps {
            println!("  l = {}, k = {}, h = {:.3}", t.delay, t.doppler, t.gain);
        }
    }

    let cfg = FrameConfig::new(AffineParams::new(256, 64, 0.0)?, Approach::CleanPilot, 1, 0);
    let framer = Framer::new(cfg.clone())?;
    let tx = framer.build_frame(&payload(&cfg))?;
    for snr in [5.0, 15.0, 25.0] {
        let spec = ChannelSpec::two_tap(false).with_noise_var(snr_to_noise_var(snr, &cfg));
        let y = apply_channel(&tx.samples, cfg.cp_len, &spec, Seed(4))?;
        let planes = framer.extract_received_planes(&y)?;
        let est = estimate_channel_freq(&planes.freq, &framer)?.with_truth(&spec);
        println!(
            "comb estimate at {snr} dB: tap NMSE {:.2e}",
            est.nmse.unwrap()
        );
    }
    Ok(())
}
