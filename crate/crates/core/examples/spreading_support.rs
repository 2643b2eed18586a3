//! Where one affine symbol lands in frequency, and the closed-form kernel
//! that predicts it.

use afdm_rsma::transforms::{affine_to_freq_closed_form, AffineParams, Transformer};
use afdm_rsma::{ComplexFrame, Domain};

fn main() -> afdm_rsma::Result<()> {
    let params = AffineParams::new(32, 8, 0.05)?;
    let xf = Transformer::new(&params);

    for i in [0usize, 3, 13] {
        let spread = xf.affine_to_freq(&ComplexFrame::impulse(32, i, Domain::Affine))?;
        let support: Vec<usize> = (0..32).filter(|&m| spread[m].norm() > 1e-9).collect();
        let mags: Vec<String> = support
            .iter()
            .map(|&m| format!("{:.3}", spread[m].norm()))
            .collect();
        println!(
            "affine {i:2} (class {}) -> subcarriers {support:?} magnitudes {}",
            params.class_of(i),
            mags.join(" ")
        );
    }

    let x = ComplexFrame::impulse(32, 13, Domain::Affine);
    let fast = xf.affine_to_freq(&x)?;
    let closed = affine_to_freq_closed_form(&x, &params)?;
    println!(
        "closed form vs transform path: {:.3e}",
        fast.distance_sqr(&closed).sqrt()
    );
    Ok(())
}
