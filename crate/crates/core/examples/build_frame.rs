//! Resource layout and power budget of both pilot layouts.

use afdm_rsma::framing::{bits_per_user, split_messages, Approach, FrameConfig, Framer};
use afdm_rsma::transforms::AffineParams;

fn main() -> afdm_rsma::Result<()> {
    for approach in [Approach::CleanPilot, Approach::PilotAndData] {
        let cfg = FrameConfig::new(AffineParams::new(256, 64, 0.0)?, approach, 1, 0);
        let framer = Framer::new(cfg.clone())?;
        let c = framer.capacity();
        println!(
            "{approach:?}: guard {}, cp {}, common {}, extra {}, private {}, sample energy {:.4}",
            cfg.guard,
            cfg.cp_len,
            c.n_common,
            c.n_extra,
            c.n_private,
            cfg.mean_sample_energy()
        );

        let need = bits_per_user(&cfg);
        let u1: Vec<u8> = (0..need).map(|i| (i % 3 == 0) as u8).collect();
        let u2: Vec<u8> = (0..need).map(|i| (i % 5 == 0) as u8).collect();
        let msgs = split_messages(&u1, &u2, &cfg)?;
        let tx = framer.build_frame(&msgs.frame_payload(0))?;
        println!(
            "  frame of user 1: {} samples, energy per body sample {:.4}",
            tx.samples.len(),
            tx.samples.as_slice()[cfg.cp_len..]
                .iter()
                .map(|v| v.norm_sqr())
                .sum::<f64>()
                / 256.0
        );
    }
    Ok(())
}
