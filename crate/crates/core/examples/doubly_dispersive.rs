//! Delay-Doppler link: affine pilot estimation and full-matrix MMSE,
//! against the one-tap OFDM baseline.

use afdm_rsma::harness::{run_sweep, ConfigFile, LinkKind};

fn main() -> afdm_rsma::Result<()> {
    let file = ConfigFile {
        doppler: Some(true),
        approach: Some(2),
        frames: Some(40),
        snr_grid_db: Some(vec![5.0, 15.0, 25.0]),
        ..Default::default()
    };
    let (mut sim, _) = file.resolve()?;
    println!("channel taps: {:?}", sim.channel.taps);
    for link in [LinkKind::Proposed, LinkKind::Baseline] {
        sim.link = link;
        println!("{link:?}");
        for r in run_sweep(&sim)? {
            println!(
                "  {:>4} dB  common {:.4}  private {:.4}  nmse {:.2e}",
                r.snr_db, r.ber_common, r.ber_private, r.channel_nmse
            );
        }
    }
    Ok(())
}
