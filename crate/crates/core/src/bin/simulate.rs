use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use afdm_rsma::harness::{
    emit_plot_data, emit_results, run_sweep, write_csv, write_json, ConfigFile, OutputFormat,
};
use afdm_rsma::Error;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Sicfree,
    SicClean,
    SicFull,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Monte Carlo BER and spectral-efficiency sweeps of the AFDM/OFDM RSMA link.
#[derive(Debug, Parser)]
#[command(name = "simulate", version)]
struct Args {
    /// JSON configuration file; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    snr_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    snr_max: Option<f64>,
    #[arg(long)]
    snr_step: Option<f64>,
    /// Frames per SNR point.
    #[arg(long)]
    frames: Option<usize>,
    /// 1: clean pilot, 2: pilot shares its class with extra common data.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    approach: Option<u8>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long = "c1prime")]
    c1_prime: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pilot_db: Option<f64>,
    #[arg(long, value_enum)]
    doppler: Option<Switch>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Results file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Also write fig5.csv .. fig9.csv into this directory.
    #[arg(long, value_name = "DIR", num_args = 0..=1, default_missing_value = ".")]
    emit_plot_data: Option<PathBuf>,
}

impl Args {
    fn overrides(&self) -> ConfigFile {
        ConfigFile {
            snr_min: self.snr_min,
            snr_max: self.snr_max,
            snr_step: self.snr_step,
            frames: self.frames,
            approach: self.approach,
            mode: self.mode.map(|m| {
                match m {
                    Mode::Sicfree => "sicfree",
                    Mode::SicClean => "sic-clean",
                    Mode::SicFull => "sic-full",
                }
                .to_string()
            }),
            c1_prime: self.c1_prime,
            pilot_db: self.pilot_db,
            doppler: self.doppler.map(|d| matches!(d, Switch::On)),
            seed: self.seed,
            threads: self.threads,
            out: self.out.clone(),
            format: self.format.map(|f| {
                match f {
                    Format::Csv => "csv",
                    Format::Json => "json",
                }
                .to_string()
            }),
            ..Default::default()
        }
    }
}

fn run(args: &Args) -> Result<(), Error> {
    let file = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let merged = file.merge(&args.overrides());
    let (sim, out) = merged.resolve()?;

    let results = run_sweep(&sim)?;
    for r in &results {
        if let Some(e) = &r.error {
            eprintln!("snr {} dB: {e}", r.snr_db);
        }
    }
    match &out.out {
        Some(path) => emit_results(&results, out.format, path)?,
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            match out.format {
                OutputFormat::Csv => write_csv(&results, &mut lock)?,
                OutputFormat::Json => write_json(&results, &mut lock)?,
            }
            lock.flush()?;
        }
    }
    if let Some(dir) = &args.emit_plot_data {
        emit_plot_data(&merged, dir)?;
    }
    if results.iter().any(|r| r.error.is_some()) {
        return Err(Error::InvalidParams("some SNR points failed".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Config(_)) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
