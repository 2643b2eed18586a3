//! BER against SNR for the three receivers and the OFDM baseline, written
//! as CSV to standard output.

use std::io::stdout;

use afdm_rsma::harness::{run_sweep, write_csv, ConfigFile, LinkKind};
use afdm_rsma::receiver::ReceiverMode;

fn main() -> afdm_rsma::Result<()> {
    let (base, _) = ConfigFile {
        frames: Some(100),
        ..Default::default()
    }
    .resolve()?;

    for mode in [
        ReceiverMode::SicFree,
        ReceiverMode::SicCleanPilot,
        ReceiverMode::SicFull,
    ] {
        let mut sim = base.clone();
        sim.receiver_mode = mode;
        println!("# proposed, {mode:?}");
        write_csv(&run_sweep(&sim)?, stdout())?;
    }
    let mut sim = base;
    sim.link = LinkKind::Baseline;
    println!("# baseline");
    write_csv(&run_sweep(&sim)?, stdout())?;
    Ok(())
}
