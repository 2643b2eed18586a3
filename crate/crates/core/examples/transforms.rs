//! DAFT round trip and energy preservation on a random affine frame.

use afdm_rsma::transforms::{AffineParams, Transformer};
use afdm_rsma::{ComplexFrame, Domain};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> afdm_rsma::Result<()> {
    let params = AffineParams::new(256, 64, 0.0)?;
    let xf = Transformer::new(&params);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let x = ComplexFrame::new(
        (0..256)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect(),
        Domain::Affine,
    );

    let s = xf.idaft(&x)?;
    let back = xf.daft(&s)?;
    println!(
        "N = {}, c1' = {}, M = {}",
        params.n(),
        params.c1_prime(),
        params.m()
    );
    println!("energy affine {:.6}  time {:.6}", x.energy(), s.energy());
    println!("round-trip error {:.3e}", back.distance_sqr(&x).sqrt());

    let f = xf.affine_to_freq(&x)?;
    let again = xf.freq_to_affine(&f)?;
    println!(
        "affine -> freq -> affine error {:.3e}",
        again.distance_sqr(&x).sqrt()
    );
    Ok(())
}
