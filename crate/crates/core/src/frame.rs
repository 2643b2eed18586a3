use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The index space a frame's samples live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Domain {
    Time,
    Frequency,
    Affine,
}

/// A complex baseband vector tagged with its domain.
///
/// Only transform operations produce a frame in a different domain; cloning,
/// scaling and adding keep the tag.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexFrame {
    data: Vec<Complex64>,
    domain: Domain,
}

impl ComplexFrame {
    pub fn new(data: Vec<Complex64>, domain: Domain) -> Self {
        Self { data, domain }
    }

    pub fn zeros(len: usize, domain: Domain) -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0); len], domain)
    }

    /// Unit impulse at `index`.
    pub fn impulse(len: usize, index: usize, domain: Domain) -> Self {
        let mut f = Self::zeros(len, domain);
        f.data[index] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.energy().sqrt()
    }

    pub fn scale(&mut self, factor: f64) {
        for z in &mut self.data {
            *z *= factor;
        }
    }

    /// `self += other`, both frames must share length and domain.
    pub fn add_assign(&mut self, other: &ComplexFrame) -> Result<()> {
        self.check_compatible(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(())
    }

    /// `self -= other`, both frames must share length and domain.
    pub fn sub_assign(&mut self, other: &ComplexFrame) -> Result<()> {
        self.check_compatible(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        Ok(())
    }

    pub fn expect_domain(&self, domain: Domain) -> Result<()> {
        if self.domain != domain {
            return Err(Error::DomainMismatch {
                expected: domain,
                got: self.domain,
            });
        }
        Ok(())
    }

    pub fn expect_len(&self, len: usize) -> Result<()> {
        if self.data.len() != len {
            return Err(Error::InvalidLength {
                expected: len,
                got: self.data.len(),
            });
        }
        Ok(())
    }

    fn check_compatible(&self, other: &ComplexFrame) -> Result<()> {
        other.expect_domain(self.domain)?;
        other.expect_len(self.data.len())
    }

    /// Squared distance to another frame of the same shape.
    pub fn distance_sqr(&self, other: &ComplexFrame) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum()
    }
}

impl std::ops::Index<usize> for ComplexFrame {
    type Output = Complex64;

    fn index(&self, index: usize) -> &Complex64 {
        &self.data[index]
    }
}

impl std::ops::IndexMut<usize> for ComplexFrame {
    fn index_mut(&mut self, index: usize) -> &mut Complex64 {
        &mut self.data[index]
    }
}
