//! Preset sweeps for the five comparison figures: spectral efficiency
//! against SNR per pilot layout (fig5) and per receiver (fig6), spectral
//! efficiency against chirp parameter (fig7), and BER against SNR for
//! delay-only (fig8) and delay-Doppler (fig9) channels.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;

use super::output::csv_row;
use super::{run_sweep, ConfigFile, LinkResult, CSV_HEADER};

/// One labelled curve of a figure.
#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub config: ConfigFile,
}

#[derive(Clone, Debug)]
pub struct Figure {
    pub name: &'static str,
    pub series: Vec<Series>,
}

fn series(label: impl Into<String>, base: &ConfigFile, over: ConfigFile) -> Series {
    Series {
        label: label.into(),
        config: base.clone().merge(&over),
    }
}

/// The five figure sweeps derived from `base`, which supplies sizes, frame
/// counts, SNR grid and seed.
pub fn figure_sweeps(base: &ConfigFile) -> Vec<Figure> {
    let delay_only = ConfigFile {
        doppler: Some(false),
        ..base.clone()
    };
    let mode = |m: &str| Some(m.to_string());

    let fig5 = Figure {
        name: "fig5",
        series: vec![
            series(
                "approach1",
                &delay_only,
                ConfigFile {
                    approach: Some(1),
                    mode: mode("sicfree"),
                    ..Default::default()
                },
            ),
            series(
                "approach2",
                &delay_only,
                ConfigFile {
                    approach: Some(2),
                    mode: mode("sicfree"),
                    ..Default::default()
                },
            ),
            series(
                "baseline",
                &delay_only,
                ConfigFile {
                    link: mode("baseline"),
                    ..Default::default()
                },
            ),
        ],
    };

    let fig6 = Figure {
        name: "fig6",
        series: [
            ("approach1-sicfree", 1, "sicfree"),
            ("approach2-sicfree", 2, "sicfree"),
            ("approach2-sic-clean", 2, "sic-clean"),
            ("approach2-sic-full", 2, "sic-full"),
        ]
        .into_iter()
        .map(|(label, a, m)| {
            series(
                label,
                &delay_only,
                ConfigFile {
                    approach: Some(a),
                    mode: mode(m),
                    ..Default::default()
                },
            )
        })
        .collect(),
    };

    let fig7 = Figure {
        name: "fig7",
        series: [8, 32, 64, 128]
            .into_iter()
            .map(|c1p| {
                series(
                    format!("c1p={c1p}"),
                    &delay_only,
                    ConfigFile {
                        approach: Some(2),
                        mode: mode("sicfree"),
                        c1_prime: Some(c1p),
                        snr_grid_db: Some(vec![16.0]),
                        ..Default::default()
                    },
                )
            })
            .collect(),
    };

    let ber_figure = |name: &'static str, doppler: bool| {
        let channel = ConfigFile {
            doppler: Some(doppler),
            ..base.clone()
        };
        let mut s: Vec<Series> = [10.0, 15.0]
            .into_iter()
            .flat_map(|pilot| {
                [("sicfree", "sicfree"), ("sic", "sic-full")].map(|(tag, m)| {
                    series(
                        format!("proposed-{tag}-pilot{pilot}dB"),
                        &channel,
                        ConfigFile {
                            pilot_db: Some(pilot),
                            mode: mode(m),
                            ..Default::default()
                        },
                    )
                })
            })
            .collect();
        s.push(series(
            "baseline-pilot10dB",
            &channel,
            ConfigFile {
                link: mode("baseline"),
                pilot_db: Some(10.0),
                ..Default::default()
            },
        ));
        Figure { name, series: s }
    };

    vec![
        fig5,
        fig6,
        fig7,
        ber_figure("fig8", false),
        ber_figure("fig9", true),
    ]
}

/// Runs every figure sweep and writes `fig5.csv` .. `fig9.csv` into `dir`.
///
/// Each file has the result columns prefixed by a `series` label. A
/// series whose configuration is infeasible appears as a single row of
/// `NaN` values with zero frames.
pub fn emit_plot_data(base: &ConfigFile, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for fig in figure_sweeps(base) {
        let mut w = BufWriter::new(File::create(dir.join(format!("{}.csv", fig.name)))?);
        writeln!(w, "series,{CSV_HEADER}")?;
        for s in &fig.series {
            for r in run_series(s) {
                writeln!(w, "{},{}", s.label, csv_row(&r))?;
            }
        }
        w.flush()?;
    }
    Ok(())
}

fn run_series(s: &Series) -> Vec<LinkResult> {
    let outcome = s.config.resolve().and_then(|(sim, _)| run_sweep(&sim));
    match outcome {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{}: {e}", s.label);
            let snr = s
                .config
                .snr_grid()
                .ok()
                .and_then(|g| g.first().copied())
                .unwrap_or(f64::NAN);
            vec![LinkResult::failed(snr, &e)]
        }
    }
}
