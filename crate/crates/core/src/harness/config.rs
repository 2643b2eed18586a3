//! JSON run configuration.
//!
//! Every field is optional; missing ones take the defaults below. Command
//! line flags are parsed into the same structure and layered on top with
//! [`ConfigFile::merge`].
//!
//! ```json
//! {
//!   "n": 256, "c1_prime": 64, "c2": 0.0, "approach": 2,
//!   "pilot_db": 10.0, "common_power": 1.0, "private_power": 0.1,
//!   "modulation": 4,
//!   "channel": { "taps": [[1.0, 0.0, 0, 0], [0.6, 0.0, 1, 1]], "normalize": true },
//!   "snr_min": 0, "snr_max": 25, "snr_step": 5,
//!   "frames": 200, "mode": "sicfree", "link": "proposed", "csi": "estimated",
//!   "equalization": "frequency", "equalizer": "auto",
//!   "seed": 1, "out": "results.csv", "format": "csv"
//! }
//! ```
//!
//! Taps are `[re(h), im(h), delay, doppler]`. Without taps, a two-tap
//! channel is used, with one Doppler bin on the second tap when `doppler`
//! is set. `guard`, `cp_len`, `max_delay` and `max_doppler` default to
//! values sized for the channel.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelSpec, ChannelTap};
use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::framing::{db_to_linear, default_guard, Approach, FrameConfig};
use crate::receiver::{EqualizationDomain, EqualizerMethod, ReceiverMode};
use crate::seed::Seed;
use crate::transforms::AffineParams;

use super::{snr_range, CsiMode, LinkKind, SimConfig};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputSpec {
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelFile {
    pub taps: Vec<[f64; 4]>,
    pub normalize: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub n: Option<usize>,
    pub c1_prime: Option<usize>,
    pub c2: Option<f64>,
    pub approach: Option<u8>,
    pub guard: Option<usize>,
    pub cp_len: Option<usize>,
    pub max_delay: Option<usize>,
    pub max_doppler: Option<usize>,
    pub pilot_db: Option<f64>,
    pub common_power: Option<f64>,
    pub private_power: Option<f64>,
    pub modulation: Option<usize>,
    pub channel: Option<ChannelFile>,
    pub doppler: Option<bool>,
    pub snr_min: Option<f64>,
    pub snr_max: Option<f64>,
    pub snr_step: Option<f64>,
    pub snr_grid_db: Option<Vec<f64>>,
    pub frames: Option<usize>,
    pub mode: Option<String>,
    pub link: Option<String>,
    pub csi: Option<String>,
    pub equalization: Option<String>,
    pub equalizer: Option<String>,
    pub threshold_sigmas: Option<f64>,
    pub sinr_cap_db: Option<f64>,
    pub noise_var: Option<f64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident, $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Fields set in `over` replace those in `self`. An explicit SNR list
    /// and an SNR range exclude each other, so setting either clears the
    /// other.
    pub fn merge(mut self, over: &ConfigFile) -> Self {
        if over.snr_grid_db.is_some() {
            self.snr_min = None;
            self.snr_max = None;
            self.snr_step = None;
        }
        if over.snr_min.is_some() || over.snr_max.is_some() || over.snr_step.is_some() {
            self.snr_grid_db = None;
        }
        overlay!(
            self,
            over,
            n,
            c1_prime,
            c2,
            approach,
            guard,
            cp_len,
            max_delay,
            max_doppler,
            pilot_db,
            common_power,
            private_power,
            modulation,
            channel,
            doppler,
            snr_min,
            snr_max,
            snr_step,
            snr_grid_db,
            frames,
            mode,
            link,
            csi,
            equalization,
            equalizer,
            threshold_sigmas,
            sinr_cap_db,
            noise_var,
            seed,
            threads,
            out,
            format
        );
        self
    }

    pub fn channel_spec(&self) -> Result<ChannelSpec> {
        let doppler = self.doppler;
        match &self.channel {
            Some(file) if !file.taps.is_empty() => {
                let taps = file
                    .taps
                    .iter()
                    .map(|&[re, im, l, k]| {
                        if l < 0.0 || l.fract() != 0.0 || k.fract() != 0.0 {
                            return Err(Error::Config(format!(
                                "tap delay {l} and Doppler {k} must be integers, delay >= 0"
                            )));
                        }
                        let k = if doppler == Some(false) { 0 } else { k as i32 };
                        Ok(ChannelTap::new(Complex64::new(re, im), l as usize, k))
                    })
                    .collect::<Result<Vec<_>>>()?;
                ChannelSpec::new(taps, 0.0, file.normalize.unwrap_or(true))
                    .map_err(|e| Error::Config(e.to_string()))
            }
            _ => Ok(ChannelSpec::two_tap(doppler.unwrap_or(false))),
        }
    }

    pub fn frame_config(&self, channel: &ChannelSpec) -> Result<FrameConfig> {
        let config = |e: Error| Error::Config(e.to_string());
        let affine = AffineParams::new(
            self.n.unwrap_or(256),
            self.c1_prime.unwrap_or(64),
            self.c2.unwrap_or(0.0),
        )
        .map_err(config)?;
        let approach = parse_approach(self.approach.unwrap_or(1))?;
        let l = self.max_delay.unwrap_or(channel.max_delay());
        let k = self.max_doppler.unwrap_or(channel.max_doppler());
        let mut f = FrameConfig::new(affine, approach, l, k);
        f.guard = self.guard.unwrap_or(default_guard(&f.affine, l, k));
        f.cp_len = self.cp_len.unwrap_or(2 * l);
        f.pilot_power = db_to_linear(self.pilot_db.unwrap_or(10.0));
        f.common_power = self.common_power.unwrap_or(f.common_power);
        f.private_power = self.private_power.unwrap_or(f.private_power);
        f.constellation = Constellation::new(self.modulation.unwrap_or(4)).map_err(config)?;
        f.validate().map_err(config)?;
        Ok(f)
    }

    pub fn snr_grid(&self) -> Result<Vec<f64>> {
        let grid = match &self.snr_grid_db {
            Some(g) => g.clone(),
            None => snr_range(
                self.snr_min.unwrap_or(0.0),
                self.snr_max.unwrap_or(25.0),
                self.snr_step.unwrap_or(5.0),
            ),
        };
        if grid.is_empty() {
            return Err(Error::Config("SNR grid is empty".into()));
        }
        Ok(grid)
    }

    pub fn resolve(&self) -> Result<(SimConfig, OutputSpec)> {
        let channel = self.channel_spec()?;
        let frame = self.frame_config(&channel)?;
        let mut sim = SimConfig::new(frame, channel);
        sim.snr_grid_db = self.snr_grid()?;
        sim.frames_per_point = self.frames.unwrap_or(sim.frames_per_point);
        if let Some(m) = &self.mode {
            sim.receiver_mode = parse_mode(m)?;
        }
        if let Some(l) = &self.link {
            sim.link = match l.as_str() {
                "proposed" => LinkKind::Proposed,
                "baseline" => LinkKind::Baseline,
                other => return Err(Error::Config(format!("unknown link {other:?}"))),
            };
        }
        if let Some(c) = &self.csi {
            sim.csi = match c.as_str() {
                "estimated" => CsiMode::Estimated,
                "perfect" => CsiMode::Perfect,
                other => return Err(Error::Config(format!("unknown csi mode {other:?}"))),
            };
        }
        if let Some(d) = &self.equalization {
            sim.equalization = match d.as_str() {
                "frequency" => EqualizationDomain::Frequency,
                "affine" => EqualizationDomain::Affine,
                other => {
                    return Err(Error::Config(format!(
                        "unknown equalization domain {other:?}"
                    )))
                }
            };
        }
        if let Some(e) = &self.equalizer {
            sim.equalizer = match e.as_str() {
                "auto" => None,
                "zf" => Some(EqualizerMethod::Zf),
                "mmse" => Some(EqualizerMethod::Mmse),
                other => return Err(Error::Config(format!("unknown equalizer {other:?}"))),
            };
        }
        sim.threshold_sigmas = self.threshold_sigmas.unwrap_or(sim.threshold_sigmas);
        sim.sinr_cap_db = self.sinr_cap_db.unwrap_or(sim.sinr_cap_db);
        sim.noise_var_override = self.noise_var;
        sim.seed = Seed(self.seed.unwrap_or(1));
        sim.threads = self.threads;
        sim.validate().map_err(|e| match e {
            Error::Config(_) => e,
            other => Error::Config(other.to_string()),
        })?;

        let format = match self.format.as_deref() {
            None | Some("csv") => OutputFormat::Csv,
            Some("json") => OutputFormat::Json,
            Some(other) => return Err(Error::Config(format!("unknown format {other:?}"))),
        };
        Ok((
            sim,
            OutputSpec {
                out: self.out.clone(),
                format,
            },
        ))
    }
}

pub fn parse_approach(a: u8) -> Result<Approach> {
    match a {
        1 => Ok(Approach::CleanPilot),
        2 => Ok(Approach::PilotAndData),
        other => Err(Error::Config(format!(
            "approach must be 1 or 2, got {other}"
        ))),
    }
}

pub fn parse_mode(s: &str) -> Result<ReceiverMode> {
    match s {
        "sicfree" | "sic-free" => Ok(ReceiverMode::SicFree),
        "sic-clean" | "sic-clean-pilot" => Ok(ReceiverMode::SicCleanPilot),
        "sic-full" => Ok(ReceiverMode::SicFull),
        other => Err(Error::Config(format!("unknown receiver mode {other:?}"))),
    }
}
