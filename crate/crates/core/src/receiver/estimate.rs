use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use num_complex::Complex64;

use crate::channel::{freq_response, ChannelSpec, ChannelTap};
use crate::error::{Error, Result};
use crate::frame::{ComplexFrame, Domain};
use crate::framing::{Approach, Framer};
use crate::transforms::cis;

/// Peaks below this fraction of the strongest pilot peak are numerical noise.
const RELATIVE_PEAK_FLOOR: f64 = 1e-6;

/// Default detection threshold, in noise standard deviations.
pub const DEFAULT_THRESHOLD_SIGMAS: f64 = 3.0;

/// Estimated channel taps plus, for delay-only channels, their
/// per-subcarrier response.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelEstimate {
    pub taps: Vec<ChannelTap>,
    pub freq_response: Option<Vec<Complex64>>,
    /// Plane the pilot was read in.
    pub domain: Domain,
    /// Tap-grid NMSE against the true channel, when known.
    pub nmse: Option<f64>,
}

impl ChannelEstimate {
    /// The true channel, as a genie-aided receiver would see it.
    pub fn perfect(spec: &ChannelSpec, n: usize) -> Self {
        let freq = freq_response(spec, n).ok();
        Self {
            taps: spec.taps.clone(),
            domain: if freq.is_some() {
                Domain::Frequency
            } else {
                Domain::Affine
            },
            freq_response: freq,
            nmse: Some(0.0),
        }
    }

    /// Builds an estimate from taps, filling the response when delay-only.
    pub fn from_taps(taps: Vec<ChannelTap>, domain: Domain, n: usize) -> Self {
        let mut est = Self {
            taps,
            freq_response: None,
            domain,
            nmse: None,
        };
        est.freq_response = freq_response(&est.as_spec(), n).ok();
        est
    }

    pub fn has_doppler(&self) -> bool {
        self.taps.iter().any(|t| t.doppler != 0)
    }

    /// Noiseless channel with the estimated taps.
    pub fn as_spec(&self) -> ChannelSpec {
        ChannelSpec {
            taps: self.taps.clone(),
            noise_var: 0.0,
            normalize: false,
        }
    }

    pub fn response(&self, n: usize) -> Result<Vec<Complex64>> {
        match &self.freq_response {
            Some(h) if h.len() == n => Ok(h.clone()),
            _ => freq_response(&self.as_spec(), n),
        }
    }

    /// Records the tap-grid NMSE against `truth`.
    pub fn with_truth(mut self, truth: &ChannelSpec) -> Self {
        self.nmse = Some(tap_nmse(&self.taps, &truth.taps));
        self
    }
}

/// `sum |h_hat - h|^2 / sum |h|^2` over the union of delay-Doppler bins.
pub fn tap_nmse(estimate: &[ChannelTap], truth: &[ChannelTap]) -> f64 {
    let mut grid: BTreeMap<(usize, i32), (Complex64, Complex64)> = BTreeMap::new();
    let zero = Complex64::new(0.0, 0.0);
    for t in estimate {
        grid.entry((t.delay, t.doppler)).or_insert((zero, zero)).0 += t.gain;
    }
    for t in truth {
        grid.entry((t.delay, t.doppler)).or_insert((zero, zero)).1 += t.gain;
    }
    let err: f64 = grid.values().map(|(e, h)| (e - h).norm_sqr()).sum();
    let power: f64 = truth.iter().map(|t| t.gain.norm_sqr()).sum();
    err / power
}

/// Least-squares estimate on the clean pilot subcarriers, interpolated to
/// every subcarrier through a short delay profile.
///
/// The pilot's image occupies the `M = N / c1'` subcarriers of class 0.
/// Dividing by it gives `H` on that comb; an `M`-point inverse transform
/// yields delay taps `0..=max_delay`, which are expanded back to all `N`
/// subcarriers. Delays of `M` or more alias on the comb and are rejected.
pub fn estimate_channel_freq(y_freq: &ComplexFrame, framer: &Framer) -> Result<ChannelEstimate> {
    let cfg = framer.config();
    let n = cfg.n();
    y_freq.expect_domain(Domain::Frequency)?;
    y_freq.expect_len(n)?;
    if cfg.approach != Approach::CleanPilot {
        return Err(Error::PilotContaminated);
    }
    let c1p = cfg.affine.c1_prime();
    let m = cfg.affine.m();
    if cfg.max_delay >= m {
        return Err(Error::DelayAliasing {
            max_delay: cfg.max_delay,
            pilots: m,
        });
    }

    let pilot = framer
        .transformer()
        .affine_to_freq(&framer.build_affine_pilot())?;
    let scale = cfg.pilot_power.sqrt();
    let comb = (0..m)
        .map(|t| {
            let sc = t * c1p;
            if pilot[sc].norm() <= 1e-12 * scale.max(1.0) || scale == 0.0 {
                Err(Error::DegeneratePilot(sc))
            } else {
                Ok(y_freq[sc] / pilot[sc])
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let taps = (0..=cfg.max_delay)
        .map(|l| {
            let h = comb
                .iter()
                .enumerate()
                .map(|(t, &v)| v * cis(((t * l) % m) as f64 / m as f64))
                .sum::<Complex64>()
                / m as f64;
            ChannelTap::new(h, l, 0)
        })
        .collect();
    Ok(ChannelEstimate::from_taps(taps, Domain::Frequency, n))
}

/// Pilot peak search in the affine plane.
///
/// A tap `(h, l, k)` moves the pilot from index 0 to `k - c1' * l` (mod N)
/// with gain `h * exp(-j2pi c2 p^2) * exp(j pi c1' l^2 / N) * exp(-j2pi k l / N)`.
/// The bins reached by delays up to `max_delay` and Dopplers up to
/// `max_doppler` stay clear of data when the guard covers
/// `c1' * max_delay + max_doppler`. The remaining bins of that window set the
/// noise floor; a candidate bin becomes a tap when its magnitude exceeds
/// `threshold_sigmas` standard deviations of that floor. The strongest
/// candidate is always kept.
///
/// Dopplers are taken as non-negative and below `c1'`, so that
/// `k = shift mod c1'` and `l = (k - shift) / c1'` are unambiguous.
pub fn estimate_channel_affine(
    y_affine: &ComplexFrame,
    framer: &Framer,
    doppler_enabled: bool,
    threshold_sigmas: f64,
) -> Result<ChannelEstimate> {
    let cfg = framer.config();
    let n = cfg.n();
    y_affine.expect_domain(Domain::Affine)?;
    y_affine.expect_len(n)?;
    let c1p = cfg.affine.c1_prime();
    let l_max = cfg.max_delay;
    let k_max = if doppler_enabled { cfg.max_doppler } else { 0 };
    if k_max >= c1p {
        return Err(Error::UnresolvableDoppler {
            max_doppler: k_max,
            c1_prime: c1p,
        });
    }
    let reach = c1p * l_max + k_max;
    if reach > cfg.guard || reach >= n {
        return Err(Error::GuardViolation {
            shift: reach,
            guard: cfg.guard,
        });
    }
    if cfg.pilot_power <= 0.0 {
        return Err(Error::DegeneratePilot(0));
    }

    let bin = |s: i64| s.rem_euclid(n as i64) as usize;
    let mut candidates = Vec::with_capacity((l_max + 1) * (k_max + 1));
    for l in 0..=l_max {
        for k in 0..=k_max {
            candidates.push((l, k, bin(k as i64 - (c1p * l) as i64)));
        }
    }
    let mut floor_bins: Vec<f64> = (-((c1p * l_max) as i64)..=k_max as i64)
        .map(bin)
        .filter(|p| candidates.iter().all(|c| c.2 != *p))
        .map(|p| y_affine[p].norm_sqr())
        .collect();
    let floor = median(&mut floor_bins) / LN_2;

    let strongest = candidates
        .iter()
        .map(|c| y_affine[c.2].norm())
        .fold(0.0, f64::max);
    let threshold = (threshold_sigmas * floor.sqrt()).max(RELATIVE_PEAK_FLOOR * strongest);

    let chirp = framer.transformer().affine_chirp();
    let amplitude = cfg.pilot_power.sqrt();
    let two_n = 2 * n;
    let taps = candidates
        .iter()
        .filter(|c| {
            let mag = y_affine[c.2].norm();
            mag > threshold || (mag == strongest && mag > 0.0)
        })
        .map(|&(l, k, p)| {
            let phase = chirp[p].conj()
                * cis(((c1p * l * l) % two_n) as f64 / two_n as f64)
                * cis(-(((k * l) % n) as f64) / n as f64);
            ChannelTap::new(y_affine[p] / (amplitude * phase), l, k as i32)
        })
        .collect();
    Ok(ChannelEstimate::from_taps(taps, Domain::Affine, n))
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::apply_channel;
    use crate::framing::{FrameConfig, FramePayload};
    use crate::seed::Seed;
    use crate::transforms::AffineParams;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn framer(n: usize, c1p: usize, approach: Approach, l: usize, k: usize) -> Framer {
        Framer::new(FrameConfig::new(
            AffineParams::new(n, c1p, 0.0).unwrap(),
            approach,
            l,
            k,
        ))
        .unwrap()
    }

    fn payload(fr: &Framer, rng: &mut impl Rng) -> FramePayload {
        let cfg = fr.config();
        FramePayload {
            common_bits: (0..cfg.common_bits_per_frame())
                .map(|_| rng.random_range(0..2))
                .collect(),
            private_bits: (0..cfg.private_bits_per_frame())
                .map(|_| rng.random_range(0..2))
                .collect(),
        }
    }

    fn received(fr: &Framer, spec: &ChannelSpec, seed: u64) -> crate::framing::ReceivedPlanes {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tx = fr.build_frame(&payload(fr, &mut rng)).unwrap();
        let y = apply_channel(&tx.samples, fr.config().cp_len, spec, Seed(seed)).unwrap();
        fr.extract_received_planes(&y).unwrap()
    }

    fn tap(re: f64, im: f64, l: usize, k: i32) -> ChannelTap {
        ChannelTap::new(Complex64::new(re, im), l, k)
    }

    #[test]
    fn freq_estimate_of_identity() {
        let fr = framer(256, 64, Approach::CleanPilot, 1, 0);
        let planes = received(&fr, &ChannelSpec::identity(), 1);
        let est = estimate_channel_freq(&planes.freq, &fr).unwrap();
        for h in est.freq_response.unwrap() {
            assert!((h - 1.0).norm() < 1e-9);
        }
    }

    #[test]
    fn freq_estimate_recovers_two_taps() {
        let mut cfg = FrameConfig::new(
            AffineParams::new(256, 64, 0.0).unwrap(),
            Approach::CleanPilot,
            2,
            0,
        );
        cfg.guard = 64;
        let fr = Framer::new(cfg).unwrap();
        let spec =
            ChannelSpec::new(vec![tap(1.0, 0.0, 0, 0), tap(0.5, 0.0, 2, 0)], 0.0, false).unwrap();
        let planes = received(&fr, &spec, 2);
        let est = estimate_channel_freq(&planes.freq, &fr).unwrap();
        let truth = freq_response(&spec, 256).unwrap();
        for (a, b) in est.freq_response.as_ref().unwrap().iter().zip(&truth) {
            assert!((a - b).norm() < 1e-6);
        }
        assert!(est.with_truth(&spec).nmse.unwrap() < 1e-12);
    }

    #[test]
    fn freq_estimate_errors() {
        let fr = framer(256, 64, Approach::PilotAndData, 1, 0);
        let y = ComplexFrame::zeros(256, Domain::Frequency);
        assert!(matches!(
            estimate_channel_freq(&y, &fr),
            Err(Error::PilotContaminated)
        ));

        let mut cfg = FrameConfig::new(
            AffineParams::new(256, 64, 0.0).unwrap(),
            Approach::CleanPilot,
            4,
            0,
        );
        cfg.guard = 100;
        let fr = Framer::new(cfg).unwrap();
        assert!(matches!(
            estimate_channel_freq(&y, &fr),
            Err(Error::DelayAliasing {
                max_delay: 4,
                pilots: 4
            })
        ));

        let mut cfg = FrameConfig::new(
            AffineParams::new(256, 64, 0.0).unwrap(),
            Approach::CleanPilot,
            1,
            0,
        );
        cfg.pilot_power = 0.0;
        let fr = Framer::new(cfg).unwrap();
        assert!(matches!(
            estimate_channel_freq(&y, &fr),
            Err(Error::DegeneratePilot(0))
        ));
    }

    #[test]
    fn freq_estimate_accuracy_at_25_db() {
        let fr = framer(256, 64, Approach::CleanPilot, 1, 0);
        let mut nmse = 0.0;
        for trial in 0..100 {
            let nv = crate::channel::snr_to_noise_var(25.0, fr.config());
            let spec = ChannelSpec::two_tap(false).with_noise_var(nv);
            let planes = received(&fr, &spec, 100 + trial);
            let est = estimate_channel_freq(&planes.freq, &fr).unwrap();
            let truth = freq_response(&spec, 256).unwrap();
            let h = est.freq_response.unwrap();
            let err: f64 = h.iter().zip(&truth).map(|(a, b)| (a - b).norm_sqr()).sum();
            let pow: f64 = truth.iter().map(|b| b.norm_sqr()).sum();
            nmse += err / pow;
        }
        assert!(nmse / 100.0 < 1e-2, "{}", nmse / 100.0);
    }

    #[test]
    fn affine_estimate_single_taps() {
        let fr = framer(256, 64, Approach::CleanPilot, 1, 2);
        let planes = received(&fr, &ChannelSpec::identity(), 3);
        let est = estimate_channel_affine(&planes.affine, &fr, true, 3.0).unwrap();
        assert_eq!(est.taps.len(), 1);
        assert!((est.taps[0].gain - 1.0).norm() < 1e-9);

        let h = Complex64::from_polar(0.8, std::f64::consts::FRAC_PI_4);
        let spec = ChannelSpec::new(vec![ChannelTap::new(h, 1, 0)], 0.0, false).unwrap();
        let planes = received(&fr, &spec, 4);
        // Delay 1 moves the pilot to -64, i.e. index 192.
        assert!((planes.affine[192].norm() - 0.8 * 10f64.sqrt()).abs() < 1e-9);
        let est = estimate_channel_affine(&planes.affine, &fr, false, 3.0).unwrap();
        assert_eq!(est.taps.len(), 1);
        assert_eq!((est.taps[0].delay, est.taps[0].doppler), (1, 0));
        assert!((est.taps[0].gain - h).norm() < 1e-6);

        let spec = ChannelSpec::new(vec![tap(0.3, -0.9, 1, 2)], 0.0, false).unwrap();
        let planes = received(&fr, &spec, 5);
        let est = estimate_channel_affine(&planes.affine, &fr, true, 3.0).unwrap();
        let peak = (0..256)
            .max_by(|&a, &b| planes.affine[a].norm().total_cmp(&planes.affine[b].norm()))
            .unwrap();
        assert_eq!(peak, 256 - 64 + 2);
        assert_eq!(est.taps.len(), 1);
        assert_eq!((est.taps[0].delay, est.taps[0].doppler), (1, 2));
    }

    #[test]
    fn affine_estimate_with_chirped_affine_plane() {
        let mut cfg = FrameConfig::new(
            AffineParams::new(128, 16, 0.031).unwrap(),
            Approach::PilotAndData,
            2,
            3,
        );
        cfg.private_power = 0.0;
        let fr = Framer::new(cfg).unwrap();
        let spec = ChannelSpec::new(
            vec![
                tap(0.7, 0.1, 0, 1),
                tap(-0.2, 0.5, 1, 0),
                tap(0.1, -0.3, 2, 3),
            ],
            0.0,
            false,
        )
        .unwrap();
        let planes = received(&fr, &spec, 6);
        let est = estimate_channel_affine(&planes.affine, &fr, true, 3.0).unwrap();
        assert_eq!(est.taps.len(), 3);
        assert!(tap_nmse(&est.taps, &spec.taps) < 1e-20);
    }

    #[test]
    fn affine_estimate_errors() {
        let y = ComplexFrame::zeros(256, Domain::Affine);
        let mut cfg = FrameConfig::new(
            AffineParams::new(256, 4, 0.0).unwrap(),
            Approach::CleanPilot,
            1,
            4,
        );
        let fr = Framer::new(cfg.clone()).unwrap();
        assert!(matches!(
            estimate_channel_affine(&y, &fr, true, 3.0),
            Err(Error::UnresolvableDoppler {
                max_doppler: 4,
                c1_prime: 4
            })
        ));
        cfg.max_doppler = 1;
        cfg.guard = 4;
        let fr = Framer::new(cfg).unwrap();
        assert!(matches!(
            estimate_channel_affine(&y, &fr, true, 3.0),
            Err(Error::GuardViolation { shift: 5, guard: 4 })
        ));
        assert!(estimate_channel_affine(&y, &fr, false, 3.0).is_ok());
    }

    #[test]
    fn noise_bins_do_not_become_taps() {
        let fr = framer(256, 64, Approach::CleanPilot, 1, 1);
        let nv = crate::channel::snr_to_noise_var(20.0, fr.config());
        let spec = ChannelSpec::new(vec![tap(1.0, 0.0, 0, 0)], nv, false).unwrap();
        let mut spurious = 0;
        for seed in 0..50 {
            let planes = received(&fr, &spec, 200 + seed);
            let est = estimate_channel_affine(&planes.affine, &fr, true, 3.0).unwrap();
            spurious += est.taps.len() - 1;
        }
        assert!(spurious <= 5, "{spurious}");
    }

    #[test]
    fn nmse_counts_missed_and_spurious_taps() {
        let truth = [tap(1.0, 0.0, 0, 0), tap(0.0, 1.0, 1, 0)];
        assert_eq!(tap_nmse(&truth, &truth), 0.0);
        assert!((tap_nmse(&truth[..1], &truth) - 0.5).abs() < 1e-15);
        let extra = [truth[0], truth[1], tap(0.2, 0.0, 0, 1)];
        assert!((tap_nmse(&extra, &truth) - 0.02).abs() < 1e-15);
    }
}
