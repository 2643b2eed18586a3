//! Unitary DFT and discrete affine Fourier transform (DAFT) pairs, and the
//! spreading maps between the affine and frequency planes.
//!
//! With `c1 = c1'/(2N)` and `c1'` a power of two dividing `N`, the time chirp
//! `exp(j*pi*n^2/M)` is periodic in `M = N/c1'`, so its spectrum lives on every
//! `c1'`-th bin. The affine-to-frequency map therefore only couples indices of
//! equal residue modulo `c1'`: affine index `i` spreads over the `M`
//! subcarriers `m` with `m % c1' == i % c1'`, and vice versa.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::frame::{ComplexFrame, Domain};

/// Chirp geometry of an AFDM frame.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineParams {
    n: usize,
    c1_prime: usize,
    c2: f64,
}

impl AffineParams {
    pub fn new(n: usize, c1_prime: usize, c2: f64) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidParams(format!(
                "frame length {n} must be a power of two"
            )));
        }
        if c1_prime == 0 || !c1_prime.is_power_of_two() || !n.is_multiple_of(c1_prime) {
            return Err(Error::InvalidParams(format!(
                "c1' = {c1_prime} must be a power of two dividing N = {n}"
            )));
        }
        if !c2.is_finite() {
            return Err(Error::InvalidParams("c2 must be finite".into()));
        }
        Ok(Self { n, c1_prime, c2 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c1_prime(&self) -> usize {
        self.c1_prime
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn c1(&self) -> f64 {
        self.c1_prime as f64 / (2 * self.n) as f64
    }

    /// Members per residue class, `N / c1'`.
    pub fn m(&self) -> usize {
        self.n / self.c1_prime
    }

    pub fn class_of(&self, index: usize) -> usize {
        index % self.c1_prime
    }

    pub fn class_members(&self, class: usize) -> impl Iterator<Item = usize> {
        (class..self.n).step_by(self.c1_prime)
    }
}

/// Fast transform engine for one frame length and chirp pair.
///
/// FFT plans and chirp tables are built once and only read afterwards, so a
/// `Transformer` can be shared freely between threads.
#[derive(Clone)]
pub struct Transformer {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    time_chirp: Vec<Complex64>,
    affine_chirp: Vec<Complex64>,
}

impl fmt::Debug for Transformer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Transformer").field("n", &self.n).finish()
    }
}

impl Transformer {
    pub fn new(params: &AffineParams) -> Self {
        let n = params.n();
        let two_n = 2 * n as u128;
        // c1 n^2 = c1' n^2 / 2N, reduced exactly in integers.
        let time_chirp = (0..n as u128)
            .map(|k| {
                let num = (params.c1_prime() as u128 * k * k) % two_n;
                cis(num as f64 / two_n as f64)
            })
            .collect();
        Self::from_tables(n, time_chirp, real_chirp(n, params.c2()))
    }

    /// Engine for arbitrary real chirp rates; `c1 = c2 = 0` is plain OFDM.
    pub fn with_chirp_rates(n: usize, c1: f64, c2: f64) -> Self {
        Self::from_tables(n, real_chirp(n, c1), real_chirp(n, c2))
    }

    fn from_tables(n: usize, time_chirp: Vec<Complex64>, affine_chirp: Vec<Complex64>) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            fft: planner.plan_fft_forward(n),
            ifft: planner.plan_fft_inverse(n),
            time_chirp,
            affine_chirp,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `exp(j 2 pi c2 i^2)` for every affine index `i`.
    pub fn affine_chirp(&self) -> &[Complex64] {
        &self.affine_chirp
    }

    pub fn dft(&self, x: &ComplexFrame) -> Result<ComplexFrame> {
        let mut buf = self.take(x, Domain::Time)?;
        self.forward(&mut buf);
        Ok(ComplexFrame::new(buf, Domain::Frequency))
    }

    pub fn idft(&self, x: &ComplexFrame) -> Result<ComplexFrame> {
        let mut buf = self.take(x, Domain::Frequency)?;
        self.inverse(&mut buf);
        Ok(ComplexFrame::new(buf, Domain::Time))
    }

    /// `s(n) = N^-1/2 sum_i X(i) exp(j2pi(c1 n^2 + c2 i^2 + n i / N))`.
    pub fn idaft(&self, x: &ComplexFrame) -> Result<ComplexFrame> {
        let mut buf = self.take(x, Domain::Affine)?;
        mul_by(&mut buf, &self.affine_chirp, false);
        self.inverse(&mut buf);
        mul_by(&mut buf, &self.time_chirp, false);
        Ok(ComplexFrame::new(buf, Domain::Time))
    }

    /// Adjoint (and inverse) of [`Transformer::idaft`].
    pub fn daft(&self, s: &ComplexFrame) -> Result<ComplexFrame> {
        let mut buf = self.take(s, Domain::Time)?;
        mul_by(&mut buf, &self.time_chirp, true);
        self.forward(&mut buf);
        mul_by(&mut buf, &self.affine_chirp, true);
        Ok(ComplexFrame::new(buf, Domain::Affine))
    }

    /// Frequency image of an affine-domain frame, `dft(idaft(x))`.
    pub fn affine_to_freq(&self, x: &ComplexFrame) -> Result<ComplexFrame> {
        let mut buf = self.take(x, Domain::Affine)?;
        mul_by(&mut buf, &self.affine_chirp, false);
        self.inverse(&mut buf);
        mul_by(&mut buf, &self.time_chirp, false);
        self.forward(&mut buf);
        Ok(ComplexFrame::new(buf, Domain::Frequency))
    }

    /// Affine image of a frequency-domain frame, `daft(idft(x))`.
    pub fn freq_to_affine(&self, x: &ComplexFrame) -> Result<ComplexFrame> {
        let mut buf = self.take(x, Domain::Frequency)?;
        self.inverse(&mut buf);
        mul_by(&mut buf, &self.time_chirp, true);
        self.forward(&mut buf);
        mul_by(&mut buf, &self.affine_chirp, true);
        Ok(ComplexFrame::new(buf, Domain::Affine))
    }

    fn take(&self, x: &ComplexFrame, domain: Domain) -> Result<Vec<Complex64>> {
        x.expect_len(self.n)?;
        x.expect_domain(domain)?;
        Ok(x.as_slice().to_vec())
    }

    fn forward(&self, buf: &mut [Complex64]) {
        self.fft.process(buf);
        scale(buf, (self.n as f64).sqrt().recip());
    }

    fn inverse(&self, buf: &mut [Complex64]) {
        self.ifft.process(buf);
        scale(buf, (self.n as f64).sqrt().recip());
    }
}

/// `exp(j 2 pi turns)`.
pub(crate) fn cis(turns: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * turns)
}

fn real_chirp(n: usize, rate: f64) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            let k = k as f64;
            cis((rate * k * k).rem_euclid(1.0))
        })
        .collect()
}

fn mul_by(buf: &mut [Complex64], table: &[Complex64], conjugate: bool) {
    for (z, c) in buf.iter_mut().zip(table) {
        *z *= if conjugate { c.conj() } else { *c };
    }
}

fn scale(buf: &mut [Complex64], factor: f64) {
    for z in buf {
        *z *= factor;
    }
}

/// Closed-form spreading kernel between affine index `i` and subcarrier `m`.
///
/// `phi(i, m) = sum_{p<M} exp(j*pi*(p - m/c1')^2 / M) * exp(j*2*pi*i*p/N)`
/// for `i` and `m` in the same residue class, zero otherwise. Together with
/// [`spreading_coefficient`] it reproduces `affine_to_freq` entry by entry.
pub fn kernel_phi(i: usize, m: usize, params: &AffineParams) -> Result<Complex64> {
    let n = params.n();
    for index in [i, m] {
        if index >= n {
            return Err(Error::InvalidIndex { index, len: n });
        }
    }
    if params.class_of(i) != params.class_of(m) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let big_m = params.m() as f64;
    let m_frac = m as f64 / params.c1_prime() as f64;
    let sum = (0..params.m())
        .map(|p| {
            let d = p as f64 - m_frac;
            cis((d * d / (2.0 * big_m)).rem_euclid(1.0)) * cis(((i * p) % n) as f64 / n as f64)
        })
        .sum();
    Ok(sum)
}

/// Entry `(m, i)` of the unitary affine-to-frequency matrix, assembled from
/// [`kernel_phi`]:
/// `(c1'/N) * exp(j2pi c2 i^2) * exp(-j*pi*m^2/(c1'^2 M)) * phi(i, m)`.
///
/// Valid for `M >= 2`; at `M = 1` the chirp degenerates to a half-band
/// frequency shift and the residue law no longer applies.
pub fn spreading_coefficient(i: usize, m: usize, params: &AffineParams) -> Result<Complex64> {
    if params.m() < 2 {
        return Err(Error::InvalidParams(
            "closed-form spreading needs at least two members per class".into(),
        ));
    }
    let phi = kernel_phi(i, m, params)?;
    let c1p = params.c1_prime() as f64;
    let n = params.n() as f64;
    let big_m = params.m() as f64;
    let mf = m as f64;
    let chirp_i = cis((params.c2() * (i * i) as f64).rem_euclid(1.0));
    let chirp_m = cis((-mf * mf / (2.0 * c1p * c1p * big_m)).rem_euclid(1.0));
    Ok(phi * chirp_i * chirp_m * (c1p / n))
}

/// Affine-to-frequency map evaluated class by class from the closed form.
/// `O(N M^2)`; used to cross-check the FFT path.
pub fn affine_to_freq_closed_form(x: &ComplexFrame, params: &AffineParams) -> Result<ComplexFrame> {
    x.expect_domain(Domain::Affine)?;
    x.expect_len(params.n())?;
    let mut out = ComplexFrame::zeros(params.n(), Domain::Frequency);
    for m in 0..params.n() {
        let class = params.class_of(m);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in params.class_members(class) {
            acc += spreading_coefficient(i, m, params)? * x[i];
        }
        out[m] = acc;
    }
    Ok(out)
}

/// Frequency-to-affine map from the conjugate kernel.
pub fn freq_to_affine_closed_form(x: &ComplexFrame, params: &AffineParams) -> Result<ComplexFrame> {
    x.expect_domain(Domain::Frequency)?;
    x.expect_len(params.n())?;
    let mut out = ComplexFrame::zeros(params.n(), Domain::Affine);
    for i in 0..params.n() {
        let class = params.class_of(i);
        let mut acc = Complex64::new(0.0, 0.0);
        for m in params.class_members(class) {
            acc += spreading_coefficient(i, m, params)?.conj() * x[m];
        }
        out[i] = acc;
    }
    Ok(out)
}
