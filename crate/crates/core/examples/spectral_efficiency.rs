//! Achievable rate of the two pilot layouts and of the receivers at 16 dB.

use afdm_rsma::harness::{run_sweep, ConfigFile};

fn main() -> afdm_rsma::Result<()> {
    for (approach, mode) in [
        (1, "sicfree"),
        (2, "sicfree"),
        (2, "sic-clean"),
        (2, "sic-full"),
    ] {
        let (sim, _) = ConfigFile {
            approach: Some(approach),
            mode: Some(mode.into()),
            frames: Some(100),
            snr_grid_db: Some(vec![16.0]),
            ..Default::default()
        }
        .resolve()?;
        let r = &run_sweep(&sim)?[0];
        println!(
            "approach {approach} {mode:>9}: {:.3} +- {:.3} bits/s/Hz",
            r.se, r.se_stderr
        );
    }

    for c1p in [8, 32, 64] {
        let (sim, _) = ConfigFile {
            approach: Some(2),
            c1_prime: Some(c1p),
            frames: Some(100),
            snr_grid_db: Some(vec![16.0]),
            ..Default::default()
        }
        .resolve()?;
        println!("c1' = {c1p:3}: {:.3} bits/s/Hz", run_sweep(&sim)?[0].se);
    }
    Ok(())
}
