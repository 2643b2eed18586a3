use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::apply_body;
use crate::error::{Error, Result};
use crate::frame::{ComplexFrame, Domain};
use crate::transforms::Transformer;

use super::ChannelEstimate;

/// Below this magnitude a subcarrier gain is treated as zero.
const SINGULAR_GAIN: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EqualizerMethod {
    Zf,
    Mmse,
}

/// Undoes the estimated channel on a frequency or affine plane.
///
/// Delay-only estimates use one complex tap per subcarrier (an affine plane
/// is taken to the frequency plane and back). Estimates with Doppler build
/// the full `N x N` channel matrix in the plane of `y` and solve it densely.
/// `signal_power` is the mean per-bin power used by MMSE regularization.
pub fn equalize(
    y: &ComplexFrame,
    est: &ChannelEstimate,
    xf: &Transformer,
    method: EqualizerMethod,
    noise_var: f64,
    signal_power: f64,
) -> Result<ComplexFrame> {
    let n = xf.len();
    y.expect_len(n)?;
    if y.domain() == Domain::Time {
        return Err(Error::DomainMismatch {
            expected: Domain::Frequency,
            got: Domain::Time,
        });
    }
    let ratio = if signal_power > 0.0 {
        noise_var / signal_power
    } else {
        0.0
    };

    if !est.has_doppler() {
        let h = est.response(n)?;
        return match y.domain() {
            Domain::Affine => {
                let f = xf.affine_to_freq(y)?;
                xf.freq_to_affine(&one_tap(&f, &h, method, ratio)?)
            }
            _ => one_tap(y, &h, method, ratio),
        };
    }

    let h = channel_matrix(est, xf, y.domain())?;
    let rhs = DVector::from_column_slice(y.as_slice());
    let x = match method {
        EqualizerMethod::Zf => h.lu().solve(&rhs).ok_or(Error::SingularChannel(0))?,
        EqualizerMethod::Mmse => {
            let ha = h.adjoint();
            let mut gram = &ha * &h;
            for i in 0..n {
                gram[(i, i)] += Complex64::new(ratio, 0.0);
            }
            let b = &ha * rhs;
            match gram.clone().cholesky() {
                Some(c) => c.solve(&b),
                None => gram.lu().solve(&b).ok_or(Error::SingularChannel(0))?,
            }
        }
    };
    let x = x.as_slice().to_vec();
    if method == EqualizerMethod::Zf && x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::SingularChannel(0));
    }
    Ok(ComplexFrame::new(x, y.domain()))
}

fn one_tap(
    y: &ComplexFrame,
    h: &[Complex64],
    method: EqualizerMethod,
    ratio: f64,
) -> Result<ComplexFrame> {
    let out = y
        .as_slice()
        .iter()
        .zip(h)
        .enumerate()
        .map(|(m, (&v, &g))| match method {
            EqualizerMethod::Zf => {
                if g.norm() < SINGULAR_GAIN {
                    Err(Error::SingularChannel(m))
                } else {
                    Ok(v / g)
                }
            }
            EqualizerMethod::Mmse => Ok(v * g.conj() / (g.norm_sqr() + ratio)),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComplexFrame::new(out, y.domain()))
}

/// Effective channel matrix of `est` between two planes of `domain`.
pub fn channel_matrix(
    est: &ChannelEstimate,
    xf: &Transformer,
    domain: Domain,
) -> Result<DMatrix<Complex64>> {
    let n = xf.len();
    let spec = est.as_spec();
    let mut h = DMatrix::zeros(n, n);
    for q in 0..n {
        let e = ComplexFrame::impulse(n, q, domain);
        let col = match domain {
            Domain::Affine => xf.daft(&apply_body(&xf.idaft(&e)?, &spec)?)?,
            Domain::Frequency => xf.dft(&apply_body(&xf.idft(&e)?, &spec)?)?,
            Domain::Time => apply_body(&e, &spec)?,
        };
        h.set_column(q, &DVector::from_column_slice(col.as_slice()));
    }
    Ok(h)
}
