use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;

use super::{LinkResult, OutputFormat};

pub const CSV_HEADER: &str = "snr_db,ber_common,ber_private,ber_total,se,channel_nmse,frames";

/// Writes `results` as CSV: a header row, then one row per SNR point with
/// floats at ten significant digits.
pub fn write_csv<W: Write>(results: &[LinkResult], mut w: W) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in results {
        writeln!(w, "{}", csv_row(r))?;
    }
    Ok(())
}

pub(crate) fn csv_row(r: &LinkResult) -> String {
    format!(
        "{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{}",
        r.snr_db, r.ber_common, r.ber_private, r.ber_total, r.se, r.channel_nmse, r.frames
    )
}

pub fn write_json<W: Write>(results: &[LinkResult], mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, results)?;
    writeln!(w)?;
    Ok(())
}

pub fn emit_results(results: &[LinkResult], format: OutputFormat, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    match format {
        OutputFormat::Csv => write_csv(results, &mut w)?,
        OutputFormat::Json => write_json(results, &mut w)?,
    }
    w.flush()?;
    Ok(())
}
