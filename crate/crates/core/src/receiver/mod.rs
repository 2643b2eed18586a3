//! Channel estimation, equalization and two-stream detection.
//!
//! The receiver observes one frame in two planes. Common data are read in
//! the affine plane, private data in the frequency plane. Equalization runs
//! once, in either plane, and the result is carried to the other plane by
//! the unitary spreading map.

mod detect;
mod equalize;
mod estimate;

pub use detect::{detect_streams, Detection, ReceiverMode};
pub use equalize::{channel_matrix, equalize, EqualizerMethod};
pub use estimate::{
    estimate_channel_affine, estimate_channel_freq, tap_nmse, ChannelEstimate,
    DEFAULT_THRESHOLD_SIGMAS,
};

use serde::{Deserialize, Serialize};

use crate::channel::ChannelSpec;
use crate::error::Result;
use crate::frame::ComplexFrame;
use crate::framing::{Approach, Framer, ReceivedPlanes};

/// Plane in which the channel is equalized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EqualizationDomain {
    Frequency,
    Affine,
}

/// Output of [`Receiver::receive`].
#[derive(Clone, Debug)]
pub struct Reception {
    pub detection: Detection,
    pub estimate: ChannelEstimate,
}

/// Full receive chain for one frame layout and noise level.
#[derive(Clone, Debug)]
pub struct Receiver {
    framer: Framer,
    noise_var: f64,
    domain: EqualizationDomain,
    method: Option<EqualizerMethod>,
    threshold_sigmas: f64,
}

impl Receiver {
    /// Equalizes in the frequency plane, picking ZF for delay-only
    /// estimates and MMSE otherwise.
    pub fn new(framer: Framer, noise_var: f64) -> Self {
        Self {
            framer,
            noise_var,
            domain: EqualizationDomain::Frequency,
            method: None,
            threshold_sigmas: DEFAULT_THRESHOLD_SIGMAS,
        }
    }

    pub fn with_domain(mut self, domain: EqualizationDomain) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_method(mut self, method: EqualizerMethod) -> Self {
        self.method = Some(method);
        self
    }

    pub fn with_threshold(mut self, sigmas: f64) -> Self {
        self.threshold_sigmas = sigmas;
        self
    }

    pub fn framer(&self) -> &Framer {
        &self.framer
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    /// Pilot-based estimate. Clean pilots under a delay-only design use the
    /// frequency comb; everything else reads the pilot in the affine plane.
    pub fn estimate(&self, planes: &ReceivedPlanes) -> Result<ChannelEstimate> {
        let cfg = self.framer.config();
        let doppler = cfg.max_doppler > 0;
        if cfg.approach == Approach::CleanPilot && !doppler {
            estimate_channel_freq(&planes.freq, &self.framer)
        } else {
            estimate_channel_affine(&planes.affine, &self.framer, doppler, self.threshold_sigmas)
        }
    }

    pub fn method_for(&self, est: &ChannelEstimate) -> EqualizerMethod {
        self.method.unwrap_or(if est.has_doppler() {
            EqualizerMethod::Mmse
        } else {
            EqualizerMethod::Zf
        })
    }

    /// Equalized `(frequency, affine)` planes.
    pub fn equalize(
        &self,
        planes: &ReceivedPlanes,
        est: &ChannelEstimate,
    ) -> Result<(ComplexFrame, ComplexFrame)> {
        let xf = self.framer.transformer();
        let method = self.method_for(est);
        let power = self.framer.config().mean_sample_energy();
        Ok(match self.domain {
            EqualizationDomain::Frequency => {
                let f = equalize(&planes.freq, est, xf, method, self.noise_var, power)?;
                let a = xf.freq_to_affine(&f)?;
                (f, a)
            }
            EqualizationDomain::Affine => {
                let a = equalize(&planes.affine, est, xf, method, self.noise_var, power)?;
                let f = xf.affine_to_freq(&a)?;
                (f, a)
            }
        })
    }

    /// Runs the chain on received time samples (cyclic prefix included).
    /// With `csi` the true channel replaces the pilot estimate.
    pub fn receive(
        &self,
        y: &ComplexFrame,
        csi: Option<&ChannelSpec>,
        mode: ReceiverMode,
    ) -> Result<Reception> {
        let planes = self.framer.extract_received_planes(y)?;
        let estimate = match csi {
            Some(spec) => ChannelEstimate::perfect(spec, self.framer.n()),
            None => self.estimate(&planes)?,
        };
        let (freq, affine) = self.equalize(&planes, &estimate)?;
        let detection = detect_streams(&freq, &affine, &self.framer, mode)?;
        Ok(Reception {
            detection,
            estimate,
        })
    }
}
