//! Conventional power-domain RSMA on a plain OFDM frame, used as the
//! reference the superposed affine/frequency scheme is compared against.
//!
//! Common and private symbols share every data subcarrier at powers
//! `phi1` and `phi2`. Pilots sit on every `c1'`-th subcarrier and together
//! carry the same energy `phi` as the affine pilot. The receiver fits a
//! short delay profile to the pilot comb, equalizes one tap per subcarrier,
//! detects the common stream, cancels it and then detects the private
//! stream.

use num_complex::Complex64;

use crate::channel::{apply_channel, freq_response, ChannelSpec, ChannelTap};
use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::frame::{ComplexFrame, Domain};
use crate::framing::{add_cyclic_prefix, FrameConfig, FramePayload};
use crate::harness::{FrameOutcome, Link, SymbolGroup};
use crate::receiver::tap_nmse;
use crate::seed::Seed;
use crate::transforms::{cis, Transformer};

#[derive(Clone, Debug)]
pub struct OfdmRsmaLink {
    n: usize,
    spacing: usize,
    max_delay: usize,
    cp_len: usize,
    pilot_power: f64,
    common_power: f64,
    private_power: f64,
    constellation: Constellation,
    data: Vec<usize>,
    perfect_csi: bool,
    xf: Transformer,
}

impl OfdmRsmaLink {
    /// Mirrors the sizes and powers of `cfg`; the pilot comb spacing is `c1'`.
    pub fn new(cfg: &FrameConfig, perfect_csi: bool) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.n();
        let spacing = cfg.affine.c1_prime();
        if !perfect_csi && cfg.max_delay >= n / spacing {
            return Err(Error::DelayAliasing {
                max_delay: cfg.max_delay,
                pilots: n / spacing,
            });
        }
        Ok(Self {
            n,
            spacing,
            max_delay: cfg.max_delay,
            cp_len: cfg.cp_len,
            pilot_power: cfg.pilot_power,
            common_power: cfg.common_power,
            private_power: cfg.private_power,
            constellation: cfg.constellation.clone(),
            data: (0..n).filter(|m| m % spacing != 0).collect(),
            perfect_csi,
            xf: Transformer::with_chirp_rates(n, 0.0, 0.0),
        })
    }

    pub fn data_subcarriers(&self) -> &[usize] {
        &self.data
    }

    fn pilot_amplitude(&self) -> f64 {
        (self.pilot_power * self.spacing as f64 / self.n as f64).sqrt()
    }

    /// Time samples (cyclic prefix included) for the given symbols.
    pub fn modulate(&self, common: &[Complex64], private: &[Complex64]) -> Result<ComplexFrame> {
        for s in [common, private] {
            if s.len() != self.data.len() {
                return Err(Error::InvalidLength {
                    expected: self.data.len(),
                    got: s.len(),
                });
            }
        }
        let mut spectrum = ComplexFrame::zeros(self.n, Domain::Frequency);
        let p = self.pilot_amplitude();
        for m in (0..self.n).step_by(self.spacing) {
            spectrum[m] = Complex64::new(p, 0.0);
        }
        let (a, b) = (self.common_power.sqrt(), self.private_power.sqrt());
        for (i, &m) in self.data.iter().enumerate() {
            spectrum[m] = common[i] * a + private[i] * b;
        }
        Ok(add_cyclic_prefix(&self.xf.idft(&spectrum)?, self.cp_len))
    }

    /// Delay taps fitted to the pilot comb.
    pub fn estimate(&self, y_freq: &ComplexFrame) -> Result<Vec<ChannelTap>> {
        let m = self.n / self.spacing;
        let p = self.pilot_amplitude();
        if p == 0.0 {
            return Err(Error::DegeneratePilot(0));
        }
        let comb: Vec<Complex64> = (0..m).map(|t| y_freq[t * self.spacing] / p).collect();
        Ok((0..=self.max_delay)
            .map(|l| {
                let h = comb
                    .iter()
                    .enumerate()
                    .map(|(t, &v)| v * cis(((t * l) % m) as f64 / m as f64))
                    .sum::<Complex64>()
                    / m as f64;
                ChannelTap::new(h, l, 0)
            })
            .collect())
    }
}

impl Link for OfdmRsmaLink {
    fn n(&self) -> usize {
        self.n
    }

    fn common_bits_per_frame(&self) -> usize {
        self.data.len() * self.constellation.bits_per_symbol()
    }

    fn private_bits_per_frame(&self) -> usize {
        self.common_bits_per_frame()
    }

    fn mean_sample_energy(&self) -> f64 {
        (self.pilot_power + (self.common_power + self.private_power) * self.data.len() as f64)
            / self.n as f64
    }

    fn run_frame(
        &self,
        payload: &FramePayload,
        channel: &ChannelSpec,
        noise_seed: Seed,
    ) -> Result<FrameOutcome> {
        let common = self.constellation.modulate(&payload.common_bits)?;
        let private = self.constellation.modulate(&payload.private_bits)?;
        let x = self.modulate(&common, &private)?;
        let y = apply_channel(&x, self.cp_len, channel, noise_seed)?;
        let body = ComplexFrame::new(y.as_slice()[self.cp_len..].to_vec(), Domain::Time);
        let yf = self.xf.dft(&body)?;

        // One tap per subcarrier: integer Doppler only moves energy between
        // subcarriers, so the diagonal keeps just the zero-Doppler taps.
        let taps = if self.perfect_csi {
            channel
                .taps
                .iter()
                .copied()
                .filter(|t| t.doppler == 0)
                .collect()
        } else {
            self.estimate(&yf)?
        };
        let diag = ChannelSpec {
            taps: if taps.is_empty() {
                vec![ChannelTap::new(Complex64::new(0.0, 0.0), 0, 0)]
            } else {
                taps.clone()
            },
            noise_var: 0.0,
            normalize: false,
        };
        let h = freq_response(&diag, self.n)?;
        let nmse = if self.perfect_csi && !channel.has_doppler() {
            0.0
        } else {
            tap_nmse(&taps, &channel.taps)
        };

        let a = self.common_power.sqrt();
        let b = self.private_power.sqrt();
        let mut common_soft = Vec::with_capacity(self.data.len());
        let mut private_soft = Vec::with_capacity(self.data.len());
        for &m in &self.data {
            let g = h[m];
            if g.norm() < 1e-12 {
                return Err(Error::SingularChannel(m));
            }
            let eq = yf[m] / g;
            let c = if a > 0.0 { eq / a } else { eq };
            let c_hat = self.constellation.slice(&[c])[0];
            let residual = eq - c_hat * a;
            common_soft.push(c);
            private_soft.push(if b > 0.0 { residual / b } else { residual });
        }

        Ok(FrameOutcome {
            detected: FramePayload {
                common_bits: self.constellation.demodulate(&common_soft),
                private_bits: self.constellation.demodulate(&private_soft),
            },
            groups: vec![
                SymbolGroup {
                    sent: common,
                    soft: common_soft,
                },
                SymbolGroup {
                    sent: private,
                    soft: private_soft,
                },
            ],
            nmse,
        })
    }
}
