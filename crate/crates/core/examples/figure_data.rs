//! Writes fig5.csv .. fig9.csv into the directory given as the first
//! argument (default `figures`).

use std::path::PathBuf;

use afdm_rsma::harness::{emit_plot_data, ConfigFile};

fn main() -> afdm_rsma::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "figures".into()));
    let base = ConfigFile {
        frames: Some(100),
        ..Default::default()
    };
    emit_plot_data(&base, &dir)?;
    println!("wrote figure data to {}", dir.display());
    Ok(())
}
