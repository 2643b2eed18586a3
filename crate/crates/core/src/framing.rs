//! RSMA frame assembly: message splitting, resource classes, pilot
//! insertion, power scaling and cyclic prefix handling.
//!
//! Resource layout for `N` samples, chirp classes modulo `c1'` and guard `G`:
//!
//! * pilot: affine index 0, power `phi`
//! * common data: affine indices with `i % c1' != 0` and `G < i < N - G`, power `phi1`
//! * extra common data (pilot-and-data layout only): affine indices with
//!   `i % c1' == 0` and `G < i < N - G`, unit power
//! * private data: subcarriers with `m % c1' != 0`, power `phi2`
//!
//! The pilot's frequency image sits on class-0 subcarriers only, so in the
//! clean-pilot layout those subcarriers stay free of data.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::frame::{ComplexFrame, Domain};
use crate::transforms::{AffineParams, Transformer};

/// Power of the extra common symbols sharing class 0 with the pilot.
pub const EXTRA_POWER: f64 = 1.0;

/// Pilot symbol placed at affine index 0 before power scaling.
pub const PILOT_SYMBOL: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Approach {
    /// Pilot alone on class 0; its subcarriers stay clean.
    CleanPilot,
    /// Extra common data share class 0 with the pilot.
    PilotAndData,
}

/// Full recipe for one transmitted frame.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameConfig {
    pub affine: AffineParams,
    /// Affine guard half-width around the pilot.
    pub guard: usize,
    /// Linear pilot power `phi`.
    pub pilot_power: f64,
    /// Linear per-symbol power of the common stream, `phi1`.
    pub common_power: f64,
    /// Linear per-symbol power of the private stream, `phi2`.
    pub private_power: f64,
    pub constellation: Constellation,
    pub approach: Approach,
    pub cp_len: usize,
    /// Largest delay (samples) the guard and estimators are sized for.
    pub max_delay: usize,
    /// Largest Doppler (bins) the guard and estimators are sized for.
    pub max_doppler: usize,
}

impl FrameConfig {
    /// QPSK frame with a 10 dB pilot, `phi1 = 1`, `phi2 = 0.1`, guard
    /// `c1' * max_delay + max_doppler` and a cyclic prefix of `2 * max_delay`.
    pub fn new(
        affine: AffineParams,
        approach: Approach,
        max_delay: usize,
        max_doppler: usize,
    ) -> Self {
        let guard = default_guard(&affine, max_delay, max_doppler);
        Self {
            affine,
            guard,
            pilot_power: db_to_linear(10.0),
            common_power: 1.0,
            private_power: 0.1,
            constellation: Constellation::qpsk(),
            approach,
            cp_len: 2 * max_delay,
            max_delay,
            max_doppler,
        }
    }

    pub fn n(&self) -> usize {
        self.affine.n()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if 2 * self.guard + 1 >= n {
            return Err(Error::InvalidParams(format!(
                "guard {} leaves no room in a frame of {n} (need 2G + 1 < N)",
                self.guard
            )));
        }
        for (name, p) in [
            ("pilot", self.pilot_power),
            ("common", self.common_power),
            ("private", self.private_power),
        ] {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidParams(format!(
                    "{name} power {p} must be >= 0"
                )));
            }
        }
        // Separability only matters when both streams are on air.
        if self.common_power > 0.0
            && self.private_power > 0.0
            && self.common_power <= self.private_power
        {
            return Err(Error::InvalidParams(format!(
                "common power {} must exceed private power {}",
                self.common_power, self.private_power
            )));
        }
        Ok(())
    }

    pub fn resources(&self) -> ResourceMap {
        ResourceMap::new(&self.affine, self.guard, self.approach)
    }

    pub fn capacity(&self) -> CapacityCounts {
        self.resources().counts()
    }

    /// Expected energy per time sample (cyclic prefix excluded) for a
    /// unit-energy constellation.
    pub fn mean_sample_energy(&self) -> f64 {
        let c = self.capacity();
        let total = self.pilot_power
            + self.common_power * c.n_common as f64
            + EXTRA_POWER * c.n_extra as f64
            + self.private_power * c.n_private as f64;
        total / self.n() as f64
    }

    /// Common-stream bits carried by one frame.
    pub fn common_bits_per_frame(&self) -> usize {
        let c = self.capacity();
        (c.n_common + c.n_extra) * self.constellation.bits_per_symbol()
    }

    pub fn private_bits_per_frame(&self) -> usize {
        self.capacity().n_private * self.constellation.bits_per_symbol()
    }
}

/// Guard that keeps every pilot shift `k - c1' * l` clear of data.
pub fn default_guard(affine: &AffineParams, max_delay: usize, max_doppler: usize) -> usize {
    affine.c1_prime() * max_delay + max_doppler
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Index sets of one frame layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResourceMap {
    pub pilot_index: usize,
    pub common_indices: Vec<usize>,
    pub extra_indices: Vec<usize>,
    pub private_subcarriers: Vec<usize>,
}

impl ResourceMap {
    pub fn new(affine: &AffineParams, guard: usize, approach: Approach) -> Self {
        let n = affine.n();
        let in_band = |i: usize| i > guard && i + guard < n;
        let common_indices = (0..n)
            .filter(|&i| affine.class_of(i) != 0 && in_band(i))
            .collect();
        let extra_indices = match approach {
            Approach::CleanPilot => Vec::new(),
            Approach::PilotAndData => (0..n)
                .filter(|&i| affine.class_of(i) == 0 && in_band(i))
                .collect(),
        };
        let private_subcarriers = (0..n).filter(|&m| affine.class_of(m) != 0).collect();
        Self {
            pilot_index: 0,
            common_indices,
            extra_indices,
            private_subcarriers,
        }
    }

    pub fn counts(&self) -> CapacityCounts {
        CapacityCounts {
            n_common: self.common_indices.len(),
            n_extra: self.extra_indices.len(),
            n_private: self.private_subcarriers.len(),
        }
    }
}

/// Symbol counts per resource group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapacityCounts {
    pub n_common: usize,
    pub n_extra: usize,
    pub n_private: usize,
}

/// Messages of both users for one frame pair.
///
/// Each user's message is split into a common part and a private part. The
/// two common parts are merged into one common stream carried across both
/// frames; frame `k` carries the private stream of user `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsmaMessages {
    pub common_bits: Vec<u8>,
    pub private_bits: [Vec<u8>; 2],
}

/// What a single frame carries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FramePayload {
    pub common_bits: Vec<u8>,
    pub private_bits: Vec<u8>,
}

impl RsmaMessages {
    /// Common bits carried by each frame of the pair.
    pub fn common_bits_per_frame(&self) -> usize {
        self.common_bits.len() / 2
    }

    pub fn frame_payload(&self, user: usize) -> FramePayload {
        let cb = self.common_bits_per_frame();
        FramePayload {
            common_bits: self.common_bits[user * cb..(user + 1) * cb].to_vec(),
            private_bits: self.private_bits[user].clone(),
        }
    }

    /// Reassembles the messages from the two received frame payloads.
    pub fn from_payloads(payloads: [FramePayload; 2]) -> Self {
        let [a, b] = payloads;
        let mut common_bits = a.common_bits;
        common_bits.extend(b.common_bits);
        Self {
            common_bits,
            private_bits: [a.private_bits, b.private_bits],
        }
    }
}

/// Message bits each user must supply per frame pair.
pub fn bits_per_user(cfg: &FrameConfig) -> usize {
    cfg.common_bits_per_frame() + cfg.private_bits_per_frame()
}

/// Splits each user's message into its common and private parts.
///
/// Both users contribute an equal common share sized to fill one frame's
/// common resources; the rest of each message is private.
pub fn split_messages(user1: &[u8], user2: &[u8], cfg: &FrameConfig) -> Result<RsmaMessages> {
    split_by(
        user1,
        user2,
        cfg.common_bits_per_frame(),
        cfg.private_bits_per_frame(),
    )
}

/// [`split_messages`] for an arbitrary per-frame capacity.
pub fn split_by(
    user1: &[u8],
    user2: &[u8],
    common_per_frame: usize,
    private_per_frame: usize,
) -> Result<RsmaMessages> {
    let need = common_per_frame + private_per_frame;
    let cb = common_per_frame;
    for bits in [user1, user2] {
        if bits.len() != need {
            return Err(Error::InvalidLength {
                expected: need,
                got: bits.len(),
            });
        }
    }
    let mut common_bits = Vec::with_capacity(2 * cb);
    common_bits.extend_from_slice(&user1[..cb]);
    common_bits.extend_from_slice(&user2[..cb]);
    Ok(RsmaMessages {
        common_bits,
        private_bits: [user1[cb..].to_vec(), user2[cb..].to_vec()],
    })
}

/// Inverse of [`split_messages`].
pub fn merge_messages(msgs: &RsmaMessages) -> [Vec<u8>; 2] {
    let cb = msgs.common_bits_per_frame();
    std::array::from_fn(|user| {
        let mut bits = msgs.common_bits[user * cb..(user + 1) * cb].to_vec();
        bits.extend_from_slice(&msgs.private_bits[user]);
        bits
    })
}

/// A built frame plus the unscaled symbols it carries.
#[derive(Clone, Debug)]
pub struct TxFrame {
    /// Time samples with the cyclic prefix prepended.
    pub samples: ComplexFrame,
    pub common_symbols: Vec<Complex64>,
    pub extra_symbols: Vec<Complex64>,
    pub private_symbols: Vec<Complex64>,
}

/// The two receiver observation planes of Fig. 4 style receivers.
#[derive(Clone, Debug)]
pub struct ReceivedPlanes {
    pub freq: ComplexFrame,
    pub affine: ComplexFrame,
}

/// Frame builder bound to one validated configuration.
#[derive(Clone, Debug)]
pub struct Framer {
    cfg: FrameConfig,
    map: ResourceMap,
    xf: Transformer,
}

impl Framer {
    pub fn new(cfg: FrameConfig) -> Result<Self> {
        cfg.validate()?;
        let map = cfg.resources();
        let xf = Transformer::new(&cfg.affine);
        Ok(Self { cfg, map, xf })
    }

    pub fn config(&self) -> &FrameConfig {
        &self.cfg
    }

    pub fn resources(&self) -> &ResourceMap {
        &self.map
    }

    pub fn transformer(&self) -> &Transformer {
        &self.xf
    }

    pub fn capacity(&self) -> CapacityCounts {
        self.map.counts()
    }

    pub fn n(&self) -> usize {
        self.cfg.n()
    }

    pub fn build_affine_common(&self, symbols: &[Complex64]) -> Result<ComplexFrame> {
        place(
            self.n(),
            Domain::Affine,
            &self.map.common_indices,
            symbols,
            self.cfg.common_power.sqrt(),
        )
    }

    pub fn build_affine_extra(&self, symbols: &[Complex64]) -> Result<ComplexFrame> {
        place(
            self.n(),
            Domain::Affine,
            &self.map.extra_indices,
            symbols,
            EXTRA_POWER.sqrt(),
        )
    }

    pub fn build_affine_pilot(&self) -> ComplexFrame {
        let mut f = ComplexFrame::zeros(self.n(), Domain::Affine);
        f[self.map.pilot_index] = PILOT_SYMBOL * self.cfg.pilot_power.sqrt();
        f
    }

    pub fn build_freq_private(&self, symbols: &[Complex64]) -> Result<ComplexFrame> {
        place(
            self.n(),
            Domain::Frequency,
            &self.map.private_subcarriers,
            symbols,
            self.cfg.private_power.sqrt(),
        )
    }

    /// Pilot plus common (plus extra) data in the affine plane.
    pub fn affine_plane(&self, common: &[Complex64], extra: &[Complex64]) -> Result<ComplexFrame> {
        let mut plane = self.build_affine_pilot();
        plane.add_assign(&self.build_affine_common(common)?)?;
        if self.cfg.approach == Approach::PilotAndData {
            plane.add_assign(&self.build_affine_extra(extra)?)?;
        } else if !extra.is_empty() {
            return Err(Error::InvalidLength {
                expected: 0,
                got: extra.len(),
            });
        }
        Ok(plane)
    }

    /// Combined frequency plane: spread affine content plus private data.
    pub fn combined_spectrum(
        &self,
        common: &[Complex64],
        extra: &[Complex64],
        private: &[Complex64],
    ) -> Result<ComplexFrame> {
        let mut spectrum = self.xf.affine_to_freq(&self.affine_plane(common, extra)?)?;
        spectrum.add_assign(&self.build_freq_private(private)?)?;
        Ok(spectrum)
    }

    pub fn build_frame(&self, payload: &FramePayload) -> Result<TxFrame> {
        let c = self.capacity();
        let k = self.cfg.constellation.bits_per_symbol();
        if payload.common_bits.len() != (c.n_common + c.n_extra) * k {
            return Err(Error::InvalidLength {
                expected: (c.n_common + c.n_extra) * k,
                got: payload.common_bits.len(),
            });
        }
        let mut common_symbols = self.cfg.constellation.modulate(&payload.common_bits)?;
        let extra_symbols = common_symbols.split_off(c.n_common);
        let private_symbols = self.cfg.constellation.modulate(&payload.private_bits)?;

        let spectrum = self.combined_spectrum(&common_symbols, &extra_symbols, &private_symbols)?;
        let body = self.xf.idft(&spectrum)?;
        Ok(TxFrame {
            samples: add_cyclic_prefix(&body, self.cfg.cp_len),
            common_symbols,
            extra_symbols,
            private_symbols,
        })
    }

    /// Removes the cyclic prefix and observes the frame in both planes.
    pub fn extract_received_planes(&self, y: &ComplexFrame) -> Result<ReceivedPlanes> {
        y.expect_domain(Domain::Time)?;
        y.expect_len(self.n() + self.cfg.cp_len)?;
        let body = ComplexFrame::new(y.as_slice()[self.cfg.cp_len..].to_vec(), Domain::Time);
        Ok(ReceivedPlanes {
            freq: self.xf.dft(&body)?,
            affine: self.xf.daft(&body)?,
        })
    }
}

fn place(
    n: usize,
    domain: Domain,
    indices: &[usize],
    symbols: &[Complex64],
    amplitude: f64,
) -> Result<ComplexFrame> {
    if symbols.len() != indices.len() {
        return Err(Error::InvalidLength {
            expected: indices.len(),
            got: symbols.len(),
        });
    }
    let mut f = ComplexFrame::zeros(n, domain);
    for (&i, &s) in indices.iter().zip(symbols) {
        f[i] = s * amplitude;
    }
    Ok(f)
}

pub fn add_cyclic_prefix(body: &ComplexFrame, cp_len: usize) -> ComplexFrame {
    let s = body.as_slice();
    let mut out = Vec::with_capacity(s.len() + cp_len);
    out.extend_from_slice(&s[s.len() - cp_len..]);
    out.extend_from_slice(s);
    ComplexFrame::new(out, body.domain())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small(approach: Approach) -> FrameConfig {
        let mut cfg = FrameConfig::new(AffineParams::new(16, 4, 0.0).unwrap(), approach, 0, 0);
        cfg.guard = 2;
        cfg
    }

    fn random_bits(n: usize, rng: &mut impl Rng) -> Vec<u8> {
        (0..n).map(|_| rng.random_range(0..2u8)).collect()
    }

    fn random_payload(cfg: &FrameConfig, rng: &mut impl Rng) -> FramePayload {
        FramePayload {
            common_bits: random_bits(cfg.common_bits_per_frame(), rng),
            private_bits: random_bits(cfg.private_bits_per_frame(), rng),
        }
    }

    #[test]
    fn capacity_of_paper_geometry() {
        let cfg = FrameConfig::new(
            AffineParams::new(256, 64, 0.0).unwrap(),
            Approach::CleanPilot,
            0,
            0,
        );
        let mut cfg = cfg;
        cfg.guard = 8;
        assert_eq!(cfg.capacity().n_private, 252);
    }

    #[test]
    fn index_sets_on_small_frame() {
        let map = small(Approach::CleanPilot).resources();
        assert_eq!(map.common_indices, vec![3, 5, 6, 7, 9, 10, 11, 13]);
        assert!(map.extra_indices.is_empty());
        assert_eq!(map.private_subcarriers.len(), 12);

        let map = small(Approach::PilotAndData).resources();
        assert_eq!(map.extra_indices, vec![4, 8, 12]);
        assert_eq!(map.counts().n_extra, 3);
        assert!(!map.common_indices.contains(&0));
        assert!(!map.extra_indices.contains(&0));
        assert!(map
            .common_indices
            .iter()
            .all(|i| !map.extra_indices.contains(i)));
    }

    #[test]
    fn validation() {
        let mut cfg = small(Approach::CleanPilot);
        cfg.guard = 8;
        assert!(cfg.validate().is_err());
        let mut cfg = small(Approach::CleanPilot);
        cfg.private_power = 2.0;
        assert!(cfg.validate().is_err());
        cfg.common_power = 0.0;
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn first_common_index_gets_the_symbol() {
        let mut cfg = small(Approach::CleanPilot);
        cfg.common_power = 1.0;
        let fr = Framer::new(cfg).unwrap();
        let mut symbols = vec![Complex64::new(0.0, 0.0); 8];
        symbols[0] = Complex64::new(1.0, 0.0);
        let f = fr.build_affine_common(&symbols).unwrap();
        assert_eq!(f, ComplexFrame::impulse(16, 3, Domain::Affine));
    }

    #[test]
    fn common_scaling_and_guard() {
        let mut cfg = small(Approach::CleanPilot);
        cfg.common_power = 4.0;
        let fr = Framer::new(cfg).unwrap();
        let s = Constellation::qpsk().points()[1];
        let f = fr.build_affine_common(&[s; 8]).unwrap();
        for i in 0..16 {
            if fr.resources().common_indices.contains(&i) {
                assert!((f[i].norm() - 2.0).abs() < 1e-12);
            } else {
                assert_eq!(f[i], Complex64::new(0.0, 0.0), "i = {i}");
            }
        }
        assert!(matches!(
            fr.build_affine_common(&[s; 7]),
            Err(Error::InvalidLength {
                expected: 8,
                got: 7
            })
        ));
    }

    #[test]
    fn pilot_frame() {
        let mut cfg = small(Approach::CleanPilot);
        let fr = Framer::new(cfg.clone()).unwrap();
        let p = fr.build_affine_pilot();
        assert!((p[0].norm() - 10f64.sqrt()).abs() < 1e-12);
        assert!((p[0].norm() - 3.1623).abs() < 1e-4);
        assert!((1..16).all(|i| p[i] == Complex64::new(0.0, 0.0)));

        cfg.pilot_power = 1.0;
        let fr = Framer::new(cfg).unwrap();
        assert_eq!(
            fr.build_affine_pilot(),
            ComplexFrame::impulse(16, 0, Domain::Affine)
        );
    }

    #[test]
    fn private_plane() {
        let mut cfg = small(Approach::CleanPilot);
        cfg.private_power = 0.25;
        let fr = Framer::new(cfg).unwrap();
        let s = Constellation::qpsk().points()[2];
        let f = fr.build_freq_private(&[s; 12]).unwrap();
        for m in [0, 4, 8, 12] {
            assert_eq!(f[m], Complex64::new(0.0, 0.0));
        }
        assert!((f[1].norm() - 0.5).abs() < 1e-12);
        assert!((f.energy() - 0.25 * 12.0).abs() < 1e-12);
    }

    #[test]
    fn split_and_merge_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let cfg = small(Approach::PilotAndData);
        let need = bits_per_user(&cfg);
        assert_eq!(need, (8 + 3 + 12) * 2);
        let u1 = random_bits(need, &mut rng);
        let u2 = random_bits(need, &mut rng);
        let msgs = split_messages(&u1, &u2, &cfg).unwrap();
        assert_eq!(msgs.common_bits.len(), 2 * cfg.common_bits_per_frame());
        assert_eq!(msgs.private_bits[1].len(), cfg.private_bits_per_frame());
        assert_eq!(merge_messages(&msgs), [u1.clone(), u2]);

        let payloads = [msgs.frame_payload(0), msgs.frame_payload(1)];
        assert_eq!(RsmaMessages::from_payloads(payloads), msgs);

        assert!(matches!(
            split_messages(&u1[1..], &u1, &cfg),
            Err(Error::InvalidLength { .. })
        ));
    }

    #[test]
    fn no_common_capacity_routes_everything_private() {
        let mut cfg = small(Approach::CleanPilot);
        cfg.guard = 7;
        assert_eq!(cfg.capacity().n_common, 0);
        let need = bits_per_user(&cfg);
        let bits = vec![1u8; need];
        let msgs = split_messages(&bits, &bits, &cfg).unwrap();
        assert!(msgs.common_bits.is_empty());
        assert_eq!(msgs.private_bits[0].len(), need);
    }

    #[test]
    fn no_private_power_gives_plain_afdm() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut cfg = small(Approach::CleanPilot);
        cfg.private_power = 0.0;
        cfg.cp_len = 3;
        let fr = Framer::new(cfg.clone()).unwrap();
        let payload = random_payload(&cfg, &mut rng);
        let tx = fr.build_frame(&payload).unwrap();
        let plane = fr.affine_plane(&tx.common_symbols, &[]).unwrap();
        let want = add_cyclic_prefix(&fr.transformer().idaft(&plane).unwrap(), 3);
        assert_eq!(tx.samples.len(), 19);
        assert!(tx.samples.distance_sqr(&want).sqrt() < 1e-12);
    }

    #[test]
    fn no_affine_content_gives_plain_ofdm() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut cfg = small(Approach::CleanPilot);
        cfg.common_power = 0.0;
        cfg.pilot_power = 0.0;
        let fr = Framer::new(cfg.clone()).unwrap();
        let tx = fr.build_frame(&random_payload(&cfg, &mut rng)).unwrap();
        let want = fr
            .transformer()
            .idft(&fr.build_freq_private(&tx.private_symbols).unwrap())
            .unwrap();
        assert!(tx.samples.distance_sqr(&want).sqrt() < 1e-12);
    }

    #[test]
    fn extra_data_changes_only_class_zero_subcarriers() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let one = Framer::new(small(Approach::CleanPilot)).unwrap();
        let two = Framer::new(small(Approach::PilotAndData)).unwrap();
        let q = Constellation::qpsk();
        let common = q.modulate(&random_bits(16, &mut rng)).unwrap();
        let extra = q.modulate(&random_bits(6, &mut rng)).unwrap();
        let private = q.modulate(&random_bits(24, &mut rng)).unwrap();

        let s1 = one.combined_spectrum(&common, &[], &private).unwrap();
        let mut diff = two.combined_spectrum(&common, &extra, &private).unwrap();
        diff.sub_assign(&s1).unwrap();
        let want = two
            .transformer()
            .affine_to_freq(&two.build_affine_extra(&extra).unwrap())
            .unwrap();
        assert!(diff.distance_sqr(&want).sqrt() < 1e-12);
        assert!((0..16)
            .filter(|m| m % 4 != 0)
            .all(|m| diff[m].norm() < 1e-12));
    }

    #[test]
    fn frame_energy_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for approach in [Approach::CleanPilot, Approach::PilotAndData] {
            let mut cfg =
                FrameConfig::new(AffineParams::new(256, 64, 0.0).unwrap(), approach, 1, 1);
            cfg.cp_len = 0;
            let fr = Framer::new(cfg.clone()).unwrap();
            let c = cfg.capacity();
            let want = cfg.pilot_power
                + cfg.common_power * c.n_common as f64
                + cfg.private_power * c.n_private as f64
                + c.n_extra as f64;
            assert!((cfg.mean_sample_energy() * 256.0 - want).abs() < 1e-9);

            // Common and private images overlap in frequency, so the budget
            // holds on average rather than frame by frame.
            let frames = 400;
            let mean = (0..frames)
                .map(|_| {
                    let tx = fr.build_frame(&random_payload(&cfg, &mut rng)).unwrap();
                    tx.samples.energy()
                })
                .sum::<f64>()
                / frames as f64;
            assert!((mean - want).abs() < 0.01 * want, "{mean} vs {want}");
        }
    }

    #[test]
    fn clean_pilot_subcarriers_carry_only_the_pilot() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let cfg = FrameConfig::new(
            AffineParams::new(256, 64, 0.0).unwrap(),
            Approach::CleanPilot,
            1,
            0,
        );
        let fr = Framer::new(cfg.clone()).unwrap();
        let tx = fr.build_frame(&random_payload(&cfg, &mut rng)).unwrap();
        let planes = fr.extract_received_planes(&tx.samples).unwrap();
        let pilot_image = fr
            .transformer()
            .affine_to_freq(&fr.build_affine_pilot())
            .unwrap();
        let residual: f64 = (0..256)
            .step_by(64)
            .map(|m| (planes.freq[m] - pilot_image[m]).norm_sqr())
            .sum();
        let pilot: f64 = (0..256)
            .step_by(64)
            .map(|m| pilot_image[m].norm_sqr())
            .sum();
        assert!(residual < 1e-9 * pilot);
    }

    #[test]
    fn loopback_planes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let cfg = FrameConfig::new(
            AffineParams::new(256, 64, 0.0).unwrap(),
            Approach::PilotAndData,
            1,
            1,
        );
        let fr = Framer::new(cfg.clone()).unwrap();
        let tx = fr.build_frame(&random_payload(&cfg, &mut rng)).unwrap();
        let planes = fr.extract_received_planes(&tx.samples).unwrap();
        let via = fr.transformer().freq_to_affine(&planes.freq).unwrap();
        assert!(via.distance_sqr(&planes.affine).sqrt() < 1e-9);
        assert!((planes.freq.norm() - planes.affine.norm()).abs() < 1e-9);

        // Affine plane = pilot + common + extra + the private data's affine image.
        let mut want = fr
            .affine_plane(&tx.common_symbols, &tx.extra_symbols)
            .unwrap();
        let private = fr.build_freq_private(&tx.private_symbols).unwrap();
        want.add_assign(&fr.transformer().freq_to_affine(&private).unwrap())
            .unwrap();
        assert!(want.distance_sqr(&planes.affine).sqrt() < 1e-9);

        let short = ComplexFrame::zeros(256, Domain::Time);
        assert!(fr.extract_received_planes(&short).is_err());
    }

    #[test]
    fn extra_data_never_touch_pilot_or_guard() {
        let cfg = FrameConfig::new(
            AffineParams::new(256, 8, 0.0).unwrap(),
            Approach::PilotAndData,
            2,
            1,
        );
        let map = cfg.resources();
        assert_eq!(cfg.guard, 17);
        assert!(map
            .extra_indices
            .iter()
            .all(|&i| i % 8 == 0 && i > 17 && i < 256 - 17));
        assert!(!map.extra_indices.contains(&0));
    }
}
