//! Dense reference matrices built straight from the waveform and channel
//! definitions, plus small helpers shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use afdm_rsma::channel::ChannelTap;
use afdm_rsma::{ComplexFrame, Domain};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type CMat = DMatrix<Complex64>;

fn cis(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}

/// Inverse DAFT as a matrix: entry `(n, i)` is
/// `exp(j 2 pi (c1 n^2 + c2 i^2 + n i / N)) / sqrt(N)`.
pub fn idaft_matrix(n: usize, c1: f64, c2: f64) -> CMat {
    let nf = n as f64;
    CMat::from_fn(n, n, |t, i| {
        let (t, i) = (t as f64, i as f64);
        cis(2.0 * PI * (c1 * t * t + c2 * i * i + t * i / nf)) / nf.sqrt()
    })
}

/// Unitary DFT: entry `(m, n)` is `exp(-j 2 pi m n / N) / sqrt(N)`.
pub fn dft_matrix(n: usize) -> CMat {
    let nf = n as f64;
    CMat::from_fn(n, n, |m, t| {
        cis(-2.0 * PI * ((m * t) % n) as f64 / nf) / nf.sqrt()
    })
}

/// `sum_r h_r Pi^{l_r} Delta^{k_r}` with a cyclic shift `Pi` and
/// `Delta = diag(exp(j 2 pi n / L))`.
pub fn channel_matrix(taps: &[ChannelTap], len: usize) -> CMat {
    let mut h = CMat::zeros(len, len);
    for tap in taps {
        let pi = CMat::from_fn(len, len, |r, c| {
            if r == (c + tap.delay) % len {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let delta = CMat::from_diagonal(&DVector::from_fn(len, |r, _| {
            cis(2.0 * PI * tap.doppler as f64 * r as f64 / len as f64)
        }));
        h += pi * delta * tap.gain;
    }
    h
}

pub fn apply(m: &CMat, x: &ComplexFrame, domain: Domain) -> ComplexFrame {
    let v = DVector::from_column_slice(x.as_slice());
    ComplexFrame::new((m * v).iter().copied().collect(), domain)
}

pub fn random_frame(len: usize, domain: Domain, rng: &mut ChaCha8Rng) -> ComplexFrame {
    ComplexFrame::new(
        (0..len)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect(),
        domain,
    )
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Largest entry-wise difference.
pub fn max_abs_diff(a: &ComplexFrame, b: &ComplexFrame) -> f64 {
    assert_eq!(a.len(), b.len());
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `||a - b|| / ||b||`.
pub fn rel_err(a: &ComplexFrame, b: &ComplexFrame) -> f64 {
    a.distance_sqr(b).sqrt() / b.norm()
}
