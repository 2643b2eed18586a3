//! Gray-labelled square constellations with unit average energy.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Constellation {
    bits_per_symbol: usize,
    /// `points[label]`, where `label` reads the symbol's bits MSB first.
    points: Vec<Complex64>,
}

impl Constellation {
    /// Gray-coded BPSK (order 2) or square QAM (order 4, 16, 64, 256).
    ///
    /// For every order the first half of a label drives the in-phase level
    /// and the second half the quadrature level; bit value 0 maps to the
    /// positive side, so QPSK label `00` is `(1 + j)/sqrt(2)`.
    pub fn new(order: usize) -> Result<Self> {
        let bits_per_symbol = match order {
            2 => 1,
            4 => 2,
            16 => 4,
            64 => 6,
            256 => 8,
            _ => {
                return Err(Error::InvalidParams(format!(
                    "unsupported constellation order {order}"
                )))
            }
        };

        let mut points: Vec<Complex64> = if bits_per_symbol == 1 {
            vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]
        } else {
            let half = bits_per_symbol / 2;
            let mask = (1usize << half) - 1;
            (0..order)
                .map(|label| {
                    let i = gray_pam_level(label >> half, half);
                    let q = gray_pam_level(label & mask, half);
                    Complex64::new(i, q)
                })
                .collect()
        };

        let mean_energy = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / order as f64;
        let scale = mean_energy.sqrt().recip();
        for p in &mut points {
            *p *= scale;
        }

        Ok(Self {
            bits_per_symbol,
            points,
        })
    }

    pub fn qpsk() -> Self {
        Self::new(4).expect("QPSK is always supported")
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Maps a bit string (one bit per `u8`, values 0 or 1) onto symbols.
    pub fn modulate(&self, bits: &[u8]) -> Result<Vec<Complex64>> {
        let k = self.bits_per_symbol;
        if !bits.len().is_multiple_of(k) {
            return Err(Error::InvalidLength {
                expected: bits.len().div_ceil(k) * k,
                got: bits.len(),
            });
        }
        Ok(bits
            .chunks_exact(k)
            .map(|chunk| {
                let label = chunk
                    .iter()
                    .fold(0usize, |acc, &b| (acc << 1) | usize::from(b & 1));
                self.points[label]
            })
            .collect())
    }

    /// Hard decision: label of the nearest point, ties to the lowest label.
    pub fn decide(&self, symbol: Complex64) -> usize {
        let mut best = 0;
        let mut best_dist = f64::INFINITY;
        for (label, p) in self.points.iter().enumerate() {
            let d = (symbol - p).norm_sqr();
            if d < best_dist {
                best = label;
                best_dist = d;
            }
        }
        best
    }

    pub fn demodulate(&self, symbols: &[Complex64]) -> Vec<u8> {
        let k = self.bits_per_symbol;
        let mut bits = Vec::with_capacity(symbols.len() * k);
        for &s in symbols {
            let label = self.decide(s);
            bits.extend((0..k).rev().map(|shift| ((label >> shift) & 1) as u8));
        }
        bits
    }

    /// Nearest constellation points, i.e. `modulate(demodulate(symbols))`.
    pub fn slice(&self, symbols: &[Complex64]) -> Vec<Complex64> {
        symbols
            .iter()
            .map(|&s| self.points[self.decide(s)])
            .collect()
    }
}

/// Amplitude of a Gray-labelled PAM level, `+(L-1)` for label 0.
fn gray_pam_level(gray: usize, bits: usize) -> f64 {
    let mut index = gray;
    let mut shift = gray >> 1;
    while shift != 0 {
        index ^= shift;
        shift >>= 1;
    }
    let levels = 1usize << bits;
    (levels - 1) as f64 - 2.0 * index as f64
}
