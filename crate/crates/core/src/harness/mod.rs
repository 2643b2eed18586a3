//! Monte Carlo sweeps over SNR, with BER, spectral-efficiency and
//! channel-estimation metrics.
//!
//! Every frame draws its bits and noise from seeds derived from the sweep
//! seed, the SNR point index and the frame index, and per-frame results
//! are reduced in frame order. Results are therefore identical for any
//! worker count.

mod config;
mod figures;
mod link;
mod output;

pub use config::{parse_approach, parse_mode, ChannelFile, ConfigFile, OutputFormat, OutputSpec};
pub use figures::{emit_plot_data, figure_sweeps, Figure, Series};
pub use link::{CsiMode, FrameOutcome, Link, ProposedLink, SymbolGroup};
pub use output::{emit_results, write_csv, write_json, CSV_HEADER};

use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::OfdmRsmaLink;
use crate::channel::{noise_var_for_energy, ChannelSpec};
use crate::error::{Error, Result};
use crate::framing::{split_by, FrameConfig, Framer};
use crate::receiver::{
    EqualizationDomain, EqualizerMethod, ReceiverMode, DEFAULT_THRESHOLD_SIGMAS,
};
use crate::seed::Seed;

/// Default SINR ceiling for spectral-efficiency accounting.
pub const DEFAULT_SINR_CAP_DB: f64 = 30.0;

/// Which transmitter/receiver pair a sweep runs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkKind {
    /// Common data on the affine chirp waveform, private data on subcarriers.
    #[default]
    Proposed,
    /// Power-domain superposition on plain OFDM with SIC.
    Baseline,
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub frame: FrameConfig,
    /// Channel taps; the noise variance is set per SNR point.
    pub channel: ChannelSpec,
    pub snr_grid_db: Vec<f64>,
    pub frames_per_point: usize,
    pub link: LinkKind,
    pub receiver_mode: ReceiverMode,
    pub equalization: EqualizationDomain,
    pub equalizer: Option<EqualizerMethod>,
    pub csi: CsiMode,
    pub threshold_sigmas: f64,
    pub sinr_cap_db: f64,
    /// Fixed noise variance used instead of the SNR grid's.
    pub noise_var_override: Option<f64>,
    pub seed: Seed,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl SimConfig {
    /// SIC-free proposed link over 0..=25 dB in 5 dB steps, 200 frames per point.
    pub fn new(frame: FrameConfig, channel: ChannelSpec) -> Self {
        Self {
            frame,
            channel,
            snr_grid_db: snr_range(0.0, 25.0, 5.0),
            frames_per_point: 200,
            link: LinkKind::Proposed,
            receiver_mode: ReceiverMode::SicFree,
            equalization: EqualizationDomain::Frequency,
            equalizer: None,
            csi: CsiMode::Estimated,
            threshold_sigmas: DEFAULT_THRESHOLD_SIGMAS,
            sinr_cap_db: DEFAULT_SINR_CAP_DB,
            noise_var_override: None,
            seed: Seed(1),
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.frames_per_point == 0 {
            return Err(Error::Config("frames per point must be at least 1".into()));
        }
        if self.snr_grid_db.is_empty() || self.snr_grid_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::Config(
                "SNR grid must be a nonempty list of finite values".into(),
            ));
        }
        if matches!(self.threads, Some(0)) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        self.frame.validate()?;
        if self.channel.max_delay() > self.frame.cp_len {
            return Err(Error::Config(format!(
                "cyclic prefix {} is shorter than the channel delay {}",
                self.frame.cp_len,
                self.channel.max_delay()
            )));
        }
        Ok(())
    }

    pub fn build_link(&self) -> Result<Box<dyn Link>> {
        Ok(match self.link {
            LinkKind::Proposed => {
                let mut link =
                    ProposedLink::new(Framer::new(self.frame.clone())?, self.receiver_mode);
                link.domain = self.equalization;
                link.method = self.equalizer;
                link.threshold_sigmas = self.threshold_sigmas;
                link.csi = self.csi;
                Box::new(link)
            }
            LinkKind::Baseline => Box::new(OfdmRsmaLink::new(
                &self.frame,
                self.csi == CsiMode::Perfect,
            )?),
        })
    }
}

/// `min, min + step, ...` up to `max` inclusive.
pub fn snr_range(min: f64, max: f64, step: f64) -> Vec<f64> {
    if step.is_nan() || step <= 0.0 || max < min {
        return if max == min { vec![min] } else { Vec::new() };
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| min + i as f64 * step).collect()
}

/// Aggregate over the frames of one SNR point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkResult {
    pub snr_db: f64,
    pub ber_common: f64,
    pub ber_private: f64,
    pub ber_total: f64,
    pub se: f64,
    pub channel_nmse: f64,
    pub frames: usize,
    pub ber_common_stderr: f64,
    pub ber_private_stderr: f64,
    pub ber_total_stderr: f64,
    pub se_stderr: f64,
    pub common_errors: u64,
    pub common_bits: u64,
    pub private_errors: u64,
    pub private_bits: u64,
    /// Why the point could not be run.
    pub error: Option<String>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl LinkResult {
    fn failed(snr_db: f64, err: &Error) -> Self {
        Self {
            snr_db,
            ber_common: f64::NAN,
            ber_private: f64::NAN,
            ber_total: f64::NAN,
            se: f64::NAN,
            channel_nmse: f64::NAN,
            frames: 0,
            ber_common_stderr: f64::NAN,
            ber_private_stderr: f64::NAN,
            ber_total_stderr: f64::NAN,
            se_stderr: f64::NAN,
            common_errors: 0,
            common_bits: 0,
            private_errors: 0,
            private_bits: 0,
            error: Some(err.to_string()),
            wall_time: Duration::ZERO,
        }
    }

    pub fn total_errors(&self) -> u64 {
        self.common_errors + self.private_errors
    }

    pub fn total_bits(&self) -> u64 {
        self.common_bits + self.private_bits
    }
}

/// Fraction of differing bits.
pub fn measure_ber(tx: &[u8], rx: &[u8]) -> Result<f64> {
    let errors = count_errors(tx, rx)?;
    Ok(if tx.is_empty() {
        0.0
    } else {
        errors as f64 / tx.len() as f64
    })
}

pub fn count_errors(tx: &[u8], rx: &[u8]) -> Result<u64> {
    if tx.len() != rx.len() {
        return Err(Error::InvalidLength {
            expected: tx.len(),
            got: rx.len(),
        });
    }
    Ok(tx.iter().zip(rx).filter(|(a, b)| a != b).count() as u64)
}

/// Standard error of an error rate `p` measured over `bits` trials.
pub fn ber_stderr(p: f64, bits: u64) -> f64 {
    if bits == 0 {
        0.0
    } else {
        (p * (1.0 - p) / bits as f64).sqrt()
    }
}

/// Error-vector SINR of one symbol group, capped at `cap` (linear).
pub fn group_sinr(group: &SymbolGroup, cap: f64) -> f64 {
    let signal: f64 = group.sent.iter().map(|s| s.norm_sqr()).sum();
    let error: f64 = group
        .sent
        .iter()
        .zip(&group.soft)
        .map(|(s, e)| (e - s).norm_sqr())
        .sum();
    if error == 0.0 {
        cap
    } else {
        (signal / error).min(cap)
    }
}

/// Achievable rate per resource element of an `n`-sample frame:
/// `(1/n) sum_g |g| log2(1 + SINR_g)` with each group's SINR measured from
/// its error vectors and capped at `cap_db`.
pub fn measure_se(groups: &[SymbolGroup], n: usize, cap_db: f64) -> f64 {
    let cap = 10f64.powf(cap_db / 10.0);
    groups
        .iter()
        .filter(|g| !g.sent.is_empty())
        .map(|g| g.sent.len() as f64 * (1.0 + group_sinr(g, cap)).log2())
        .sum::<f64>()
        / n as f64
}

struct FrameStats {
    common_errors: u64,
    common_bits: u64,
    private_errors: u64,
    private_bits: u64,
    se: f64,
    nmse: f64,
}

/// Runs every SNR point of `sim`. Invalid configurations fail as a whole;
/// a point whose frames hit an error is reported with `error` set.
pub fn run_sweep(sim: &SimConfig) -> Result<Vec<LinkResult>> {
    sim.validate()?;
    let link = sim.build_link()?;
    let run = || {
        sim.snr_grid_db
            .iter()
            .enumerate()
            .map(|(i, &snr)| {
                run_point(link.as_ref(), sim, i, snr)
                    .unwrap_or_else(|e| LinkResult::failed(snr, &e))
            })
            .collect()
    };
    match sim.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}

/// One SNR point.
pub fn run_point(
    link: &dyn Link,
    sim: &SimConfig,
    index: usize,
    snr_db: f64,
) -> Result<LinkResult> {
    let start = Instant::now();
    let noise_var = sim
        .noise_var_override
        .unwrap_or_else(|| noise_var_for_energy(snr_db, link.mean_sample_energy()));
    let channel = sim.channel.clone().with_noise_var(noise_var);
    let base = sim.seed.child(index as u64);

    let frames: Vec<FrameStats> = (0..sim.frames_per_point)
        .into_par_iter()
        .map(|f| simulate_frame(link, &channel, base, f as u64, sim.sinr_cap_db))
        .collect::<Result<_>>()?;

    let mut r = LinkResult {
        snr_db,
        ber_common: 0.0,
        ber_private: 0.0,
        ber_total: 0.0,
        se: 0.0,
        channel_nmse: 0.0,
        frames: frames.len(),
        ber_common_stderr: 0.0,
        ber_private_stderr: 0.0,
        ber_total_stderr: 0.0,
        se_stderr: 0.0,
        common_errors: 0,
        common_bits: 0,
        private_errors: 0,
        private_bits: 0,
        error: None,
        wall_time: Duration::ZERO,
    };
    let (mut se_sum, mut se_sq, mut nmse_sum) = (0.0, 0.0, 0.0);
    for s in &frames {
        r.common_errors += s.common_errors;
        r.common_bits += s.common_bits;
        r.private_errors += s.private_errors;
        r.private_bits += s.private_bits;
        se_sum += s.se;
        se_sq += s.se * s.se;
        nmse_sum += s.nmse;
    }
    let count = frames.len() as f64;
    let rate = |e: u64, b: u64| if b == 0 { 0.0 } else { e as f64 / b as f64 };
    r.ber_common = rate(r.common_errors, r.common_bits);
    r.ber_private = rate(r.private_errors, r.private_bits);
    r.ber_total = rate(r.total_errors(), r.total_bits());
    r.ber_common_stderr = ber_stderr(r.ber_common, r.common_bits);
    r.ber_private_stderr = ber_stderr(r.ber_private, r.private_bits);
    r.ber_total_stderr = ber_stderr(r.ber_total, r.total_bits());
    r.se = se_sum / count;
    r.se_stderr = if frames.len() > 1 {
        ((se_sq - count * r.se * r.se).max(0.0) / (count - 1.0) / count).sqrt()
    } else {
        0.0
    };
    r.channel_nmse = nmse_sum / count;
    r.wall_time = start.elapsed();
    Ok(r)
}

/// Frame `f` carries the private stream of user `f % 2` from the message
/// pair of trial `f / 2`.
fn simulate_frame(
    link: &dyn Link,
    channel: &ChannelSpec,
    base: Seed,
    f: u64,
    cap_db: f64,
) -> Result<FrameStats> {
    let (cb, pb) = (link.common_bits_per_frame(), link.private_bits_per_frame());
    let mut rng = base.child(0).child(f / 2).rng();
    let mut draw = || {
        (0..cb + pb)
            .map(|_| rng.random_range(0..2u8))
            .collect::<Vec<_>>()
    };
    let (u1, u2) = (draw(), draw());
    let payload = split_by(&u1, &u2, cb, pb)?.frame_payload((f % 2) as usize);

    let out = link.run_frame(&payload, channel, base.child(1).child(f))?;
    Ok(FrameStats {
        common_errors: count_errors(&payload.common_bits, &out.detected.common_bits)?,
        common_bits: cb as u64,
        private_errors: count_errors(&payload.private_bits, &out.detected.private_bits)?,
        private_bits: pb as u64,
        se: measure_se(&out.groups, link.n(), cap_db),
        nmse: out.nmse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framing::Approach;
    use crate::transforms::AffineParams;
    use num_complex::Complex64;

    fn sim() -> SimConfig {
        let frame = FrameConfig::new(
            AffineParams::new(64, 16, 0.0).unwrap(),
            Approach::CleanPilot,
            1,
            0,
        );
        let mut s = SimConfig::new(frame, ChannelSpec::two_tap(false));
        s.frames_per_point = 6;
        s
    }

    #[test]
    fn ber_examples() {
        assert_eq!(measure_ber(&[0, 1, 1], &[0, 1, 1]).unwrap(), 0.0);
        assert_eq!(measure_ber(&[0, 1, 1], &[1, 0, 0]).unwrap(), 1.0);
        let tx = vec![0u8; 1000];
        let mut rx = tx.clone();
        rx[5] = 1;
        rx[500] = 1;
        rx[999] = 1;
        assert!((measure_ber(&tx, &rx).unwrap() - 0.003).abs() < 1e-15);
        assert!(matches!(
            measure_ber(&tx, &rx[1..]),
            Err(Error::InvalidLength { .. })
        ));
    }

    #[test]
    fn se_examples() {
        let s = vec![Complex64::new(1.0, 0.0); 10];
        let clean = SymbolGroup {
            sent: s.clone(),
            soft: s.clone(),
        };
        let se = measure_se(&[clean], 10, 30.0);
        assert!((se - 1001f64.log2()).abs() < 1e-12);
        assert!((se - 9.97).abs() < 0.01);
        assert_eq!(measure_se(&[], 10, 30.0), 0.0);
        let idle = SymbolGroup {
            sent: vec![],
            soft: vec![],
        };
        assert_eq!(measure_se(&[idle], 10, 30.0), 0.0);

        // Error energy equal to signal energy gives SINR 1, i.e. one bit.
        let noisy = SymbolGroup {
            sent: s.clone(),
            soft: s.iter().map(|v| v * 2.0).collect(),
        };
        assert!((measure_se(&[noisy], 20, 30.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn snr_grid() {
        assert_eq!(
            snr_range(0.0, 25.0, 5.0),
            vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0]
        );
        assert_eq!(snr_range(0.0, 1.0, 0.1).len(), 11);
        assert_eq!(snr_range(3.0, 3.0, 0.0), vec![3.0]);
        assert!(snr_range(3.0, 1.0, 1.0).is_empty());
    }

    #[test]
    fn validation() {
        let mut s = sim();
        s.frames_per_point = 0;
        assert!(matches!(run_sweep(&s), Err(Error::Config(_))));
        let mut s = sim();
        s.snr_grid_db.clear();
        assert!(s.validate().is_err());
        let mut s = sim();
        s.frame.cp_len = 0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn sweep_shape_and_determinism() {
        let s = sim();
        let a = run_sweep(&s).unwrap();
        assert_eq!(a.len(), 6);
        assert!(a.iter().all(|r| r.frames == 6 && r.error.is_none()));
        let mut t = s.clone();
        t.threads = Some(3);
        let b = run_sweep(&t).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(
                (x.ber_total, x.se, x.channel_nmse),
                (y.ber_total, y.se, y.channel_nmse)
            );
        }
        assert!(a.last().unwrap().se > a[0].se);
    }

    #[test]
    fn noiseless_perfect_csi_with_sic() {
        let mut s = sim();
        s.noise_var_override = Some(0.0);
        s.csi = CsiMode::Perfect;
        s.receiver_mode = ReceiverMode::SicCleanPilot;
        for r in run_sweep(&s).unwrap() {
            assert_eq!(r.ber_total, 0.0);
            assert_eq!(r.channel_nmse, 0.0);
        }
        s.link = LinkKind::Baseline;
        for r in run_sweep(&s).unwrap() {
            assert_eq!(r.ber_total, 0.0);
        }
    }

    #[test]
    fn point_errors_are_reported_in_place() {
        let mut s = sim();
        // A guard too small for the design delay makes the estimator refuse.
        s.frame.approach = Approach::PilotAndData;
        s.frame.guard = 3;
        let r = run_sweep(&s).unwrap();
        assert!(r
            .iter()
            .all(|r| r.error.is_some() && r.frames == 0 && r.ber_total.is_nan()));
    }
}
