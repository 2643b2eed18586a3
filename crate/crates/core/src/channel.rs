//! Tap channels with integer delays and Doppler shifts, plus AWGN.
//!
//! A tap `(h, l, k)` delays the signal cyclically by `l` samples and
//! rotates it by `k` cycles per body length `N`, with the Doppler phase
//! referenced to the first sample after the cyclic prefix:
//!
//! ```text
//! y(n) = sum_r h_r exp(j 2 pi k_r (n - cp - l_r) / N) x([n - l_r] mod L) + w(n)
//! ```
//!
//! Once the prefix is dropped, the `N` body samples see exactly
//! `sum_r h_r P^l_r D^k_r` with `P` the cyclic shift and
//! `D = diag(exp(j 2 pi k n / N))`. With no prefix this is the plain
//! cyclic matrix model on the whole frame.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{ComplexFrame, Domain};
use crate::framing::FrameConfig;
use crate::seed::Seed;
use crate::transforms::cis;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelTap {
    pub gain: Complex64,
    /// Delay in samples.
    pub delay: usize,
    /// Doppler shift in cycles per frame body.
    pub doppler: i32,
}

impl ChannelTap {
    pub fn new(gain: Complex64, delay: usize, doppler: i32) -> Self {
        Self {
            gain,
            delay,
            doppler,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub taps: Vec<ChannelTap>,
    pub noise_var: f64,
    /// Whether the gains were scaled to unit total power.
    pub normalize: bool,
}

impl ChannelSpec {
    /// Validates the taps and, with `normalize`, scales them to unit power.
    pub fn new(mut taps: Vec<ChannelTap>, noise_var: f64, normalize: bool) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::InvalidChannel("at least one tap is required".into()));
        }
        if !noise_var.is_finite() || noise_var < 0.0 {
            return Err(Error::InvalidChannel(format!("noise variance {noise_var}")));
        }
        if taps
            .iter()
            .any(|t| !t.gain.re.is_finite() || !t.gain.im.is_finite())
        {
            return Err(Error::InvalidChannel("non-finite tap gain".into()));
        }
        if normalize {
            let power: f64 = taps.iter().map(|t| t.gain.norm_sqr()).sum();
            if power == 0.0 {
                return Err(Error::InvalidChannel("all tap gains are zero".into()));
            }
            let s = power.sqrt().recip();
            for t in &mut taps {
                t.gain *= s;
            }
        }
        Ok(Self {
            taps,
            noise_var,
            normalize,
        })
    }

    /// Single unit tap.
    pub fn identity() -> Self {
        Self::new(
            vec![ChannelTap::new(Complex64::new(1.0, 0.0), 0, 0)],
            0.0,
            false,
        )
        .unwrap()
    }

    /// Two taps `{1, 0.6}` at delays `{0, 1}`, normalized; the second
    /// carries one Doppler bin when `doppler` is set.
    pub fn two_tap(doppler: bool) -> Self {
        let k = i32::from(doppler);
        Self::new(
            vec![
                ChannelTap::new(Complex64::new(1.0, 0.0), 0, 0),
                ChannelTap::new(Complex64::new(0.6, 0.0), 1, k),
            ],
            0.0,
            true,
        )
        .unwrap()
    }

    pub fn with_noise_var(mut self, noise_var: f64) -> Self {
        self.noise_var = noise_var;
        self
    }

    pub fn max_delay(&self) -> usize {
        self.taps.iter().map(|t| t.delay).max().unwrap_or(0)
    }

    pub fn max_doppler(&self) -> usize {
        self.taps
            .iter()
            .map(|t| t.doppler.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn has_doppler(&self) -> bool {
        self.taps.iter().any(|t| t.doppler != 0)
    }

    pub fn power(&self) -> f64 {
        self.taps.iter().map(|t| t.gain.norm_sqr()).sum()
    }
}

/// Passes a time frame (cyclic prefix of `cp_len` included) through the
/// channel and adds noise drawn from `seed`.
pub fn apply_channel(
    x: &ComplexFrame,
    cp_len: usize,
    spec: &ChannelSpec,
    seed: Seed,
) -> Result<ComplexFrame> {
    x.expect_domain(Domain::Time)?;
    let len = x.len();
    if cp_len >= len {
        return Err(Error::InvalidChannel(format!(
            "cyclic prefix {cp_len} leaves no body in a frame of {len}"
        )));
    }
    let mut y = propagate(x.as_slice(), cp_len, spec)?;
    if spec.noise_var > 0.0 {
        add_noise(&mut y, spec.noise_var, seed);
    }
    Ok(ComplexFrame::new(y, Domain::Time))
}

/// Noiseless channel on an `N`-sample body that is already cyclic.
pub fn apply_body(x: &ComplexFrame, spec: &ChannelSpec) -> Result<ComplexFrame> {
    x.expect_domain(Domain::Time)?;
    Ok(ComplexFrame::new(
        propagate(x.as_slice(), 0, spec)?,
        Domain::Time,
    ))
}

fn propagate(x: &[Complex64], cp_len: usize, spec: &ChannelSpec) -> Result<Vec<Complex64>> {
    let len = x.len();
    let n = (len - cp_len) as i64;
    let mut y = vec![Complex64::new(0.0, 0.0); len];
    for tap in &spec.taps {
        if tap.delay >= len {
            return Err(Error::InvalidChannel(format!(
                "delay {} does not fit a frame of {len}",
                tap.delay
            )));
        }
        for (i, out) in y.iter_mut().enumerate() {
            let src = (i + len - tap.delay) % len;
            let t = i as i64 - cp_len as i64 - tap.delay as i64;
            // Reduce before converting so the phase stays exact for long frames.
            let turns = (tap.doppler as i64 * t).rem_euclid(n) as f64 / n as f64;
            *out += tap.gain * cis(turns) * x[src];
        }
    }
    Ok(y)
}

/// Adds circular Gaussian noise of variance `noise_var` per sample.
pub fn add_noise(y: &mut [Complex64], noise_var: f64, seed: Seed) {
    let mut rng = seed.rng();
    let s = (noise_var / 2.0).sqrt();
    for v in y {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *v += Complex64::new(re * s, im * s);
    }
}

/// Per-subcarrier response `H(m) = sum_r h_r exp(-j 2 pi m l_r / N)` of a
/// delay-only channel.
pub fn freq_response(spec: &ChannelSpec, n: usize) -> Result<Vec<Complex64>> {
    if spec.has_doppler() {
        return Err(Error::DopplerPresent);
    }
    Ok((0..n)
        .map(|m| {
            spec.taps
                .iter()
                .map(|t| t.gain * cis(-(((m * t.delay) % n) as f64) / n as f64))
                .sum()
        })
        .collect())
}

/// Noise variance that puts `energy` per sample at `snr_db`.
pub fn noise_var_for_energy(snr_db: f64, energy: f64) -> f64 {
    energy / 10f64.powf(snr_db / 10.0)
}

/// Noise variance for a frame at `snr_db`, referenced to its mean sample
/// energy (pilot included, cyclic prefix excluded).
pub fn snr_to_noise_var(snr_db: f64, cfg: &FrameConfig) -> f64 {
    noise_var_for_energy(snr_db, cfg.mean_sample_energy())
}
