use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{apply_channel, ChannelSpec};
use crate::error::Result;
use crate::framing::{FramePayload, Framer};
use crate::receiver::{EqualizationDomain, EqualizerMethod, Receiver, ReceiverMode};
use crate::seed::Seed;

/// Where the receiver's channel knowledge comes from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CsiMode {
    /// Pilot-based estimate.
    #[default]
    Estimated,
    /// The true channel.
    Perfect,
}

/// Transmitted symbols of one resource group and their soft estimates.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolGroup {
    pub sent: Vec<Complex64>,
    pub soft: Vec<Complex64>,
}

/// What one simulated frame produced.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameOutcome {
    pub detected: FramePayload,
    pub groups: Vec<SymbolGroup>,
    /// Tap-grid NMSE of the channel estimate.
    pub nmse: f64,
}

/// One transmitter/receiver pair that the sweep can drive.
pub trait Link: Send + Sync {
    /// Samples per frame body.
    fn n(&self) -> usize;
    fn common_bits_per_frame(&self) -> usize;
    fn private_bits_per_frame(&self) -> usize;
    /// Mean transmitted energy per body sample, the SNR reference.
    fn mean_sample_energy(&self) -> f64;
    /// Sends `payload` through `channel` (noise drawn from `noise_seed`)
    /// and detects it.
    fn run_frame(
        &self,
        payload: &FramePayload,
        channel: &ChannelSpec,
        noise_seed: Seed,
    ) -> Result<FrameOutcome>;
}

/// The superposed affine/frequency RSMA link.
#[derive(Clone, Debug)]
pub struct ProposedLink {
    pub framer: Framer,
    pub mode: ReceiverMode,
    pub domain: EqualizationDomain,
    /// `None` picks ZF for delay-only estimates and MMSE otherwise.
    pub method: Option<EqualizerMethod>,
    pub threshold_sigmas: f64,
    pub csi: CsiMode,
}

impl ProposedLink {
    pub fn new(framer: Framer, mode: ReceiverMode) -> Self {
        Self {
            framer,
            mode,
            domain: EqualizationDomain::Frequency,
            method: None,
            threshold_sigmas: crate::receiver::DEFAULT_THRESHOLD_SIGMAS,
            csi: CsiMode::Estimated,
        }
    }
}

impl Link for ProposedLink {
    fn n(&self) -> usize {
        self.framer.n()
    }

    fn common_bits_per_frame(&self) -> usize {
        self.framer.config().common_bits_per_frame()
    }

    fn private_bits_per_frame(&self) -> usize {
        self.framer.config().private_bits_per_frame()
    }

    fn mean_sample_energy(&self) -> f64 {
        self.framer.config().mean_sample_energy()
    }

    fn run_frame(
        &self,
        payload: &FramePayload,
        channel: &ChannelSpec,
        noise_seed: Seed,
    ) -> Result<FrameOutcome> {
        let cfg = self.framer.config();
        let tx = self.framer.build_frame(payload)?;
        let y = apply_channel(&tx.samples, cfg.cp_len, channel, noise_seed)?;

        let mut rx = Receiver::new(self.framer.clone(), channel.noise_var)
            .with_domain(self.domain)
            .with_threshold(self.threshold_sigmas);
        if let Some(m) = self.method {
            rx = rx.with_method(m);
        }
        let csi = match self.csi {
            CsiMode::Perfect => Some(channel),
            CsiMode::Estimated => None,
        };
        let r = rx.receive(&y, csi, self.mode)?;
        let nmse = r.estimate.with_truth(channel).nmse.unwrap_or(0.0);
        let d = r.detection;
        Ok(FrameOutcome {
            detected: FramePayload {
                common_bits: d.common_bits,
                private_bits: d.private_bits,
            },
            groups: vec![
                SymbolGroup {
                    sent: tx.common_symbols,
                    soft: d.common_soft,
                },
                SymbolGroup {
                    sent: tx.extra_symbols,
                    soft: d.extra_soft,
                },
                SymbolGroup {
                    sent: tx.private_symbols,
                    soft: d.private_soft,
                },
            ],
            nmse,
        })
    }
}
