use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::frame::ComplexFrame;
use crate::framing::{Framer, EXTRA_POWER};

/// How the two streams are separated after equalization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReceiverMode {
    /// Read common data in the affine plane and private data in the
    /// frequency plane, each treating the other stream as noise.
    SicFree,
    /// Cancel the detected common stream before reading private data.
    SicCleanPilot,
    /// Additionally cancel the detected private stream and re-read the
    /// common stream, then refresh the private decisions.
    SicFull,
}

/// Hard decisions plus the normalized soft symbols they came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Detection {
    /// Common bits in payload order: regular common symbols, then extras.
    pub common_bits: Vec<u8>,
    pub private_bits: Vec<u8>,
    pub common_soft: Vec<Complex64>,
    pub extra_soft: Vec<Complex64>,
    pub private_soft: Vec<Complex64>,
}

/// Detects both streams from equalized frequency and affine planes.
pub fn detect_streams(
    freq: &ComplexFrame,
    affine: &ComplexFrame,
    framer: &Framer,
    mode: ReceiverMode,
) -> Result<Detection> {
    let xf = framer.transformer();
    let (common_soft, extra_soft) = read_common(affine, framer);
    let mut private_soft = read_private(freq, framer);
    let mut detection = decide(framer, common_soft, extra_soft, &private_soft);

    if mode == ReceiverMode::SicFree {
        return Ok(detection);
    }

    let (common, extra) = decisions(framer, &detection);
    let mut clean_freq = freq.clone();
    clean_freq.sub_assign(&xf.affine_to_freq(&framer.affine_plane(&common, &extra)?)?)?;
    private_soft = read_private(&clean_freq, framer);
    detection = decide(
        framer,
        detection.common_soft,
        detection.extra_soft,
        &private_soft,
    );

    if mode == ReceiverMode::SicFull {
        let private = slice_all(framer, &detection.private_soft);
        let mut clean_affine = affine.clone();
        clean_affine.sub_assign(&xf.freq_to_affine(&framer.build_freq_private(&private)?)?)?;
        let (common_soft, extra_soft) = read_common(&clean_affine, framer);
        detection = decide(framer, common_soft, extra_soft, &private_soft);

        let (common, extra) = decisions(framer, &detection);
        let mut clean_freq = freq.clone();
        clean_freq.sub_assign(&xf.affine_to_freq(&framer.affine_plane(&common, &extra)?)?)?;
        private_soft = read_private(&clean_freq, framer);
        detection = decide(
            framer,
            detection.common_soft,
            detection.extra_soft,
            &private_soft,
        );
    }
    Ok(detection)
}

fn normalized(plane: &ComplexFrame, indices: &[usize], power: f64) -> Vec<Complex64> {
    let scale = if power > 0.0 {
        power.sqrt().recip()
    } else {
        1.0
    };
    indices.iter().map(|&i| plane[i] * scale).collect()
}

fn read_common(affine: &ComplexFrame, framer: &Framer) -> (Vec<Complex64>, Vec<Complex64>) {
    let map = framer.resources();
    let cfg = framer.config();
    (
        normalized(affine, &map.common_indices, cfg.common_power),
        normalized(affine, &map.extra_indices, EXTRA_POWER),
    )
}

fn read_private(freq: &ComplexFrame, framer: &Framer) -> Vec<Complex64> {
    normalized(
        freq,
        &framer.resources().private_subcarriers,
        framer.config().private_power,
    )
}

fn slice_all(framer: &Framer, soft: &[Complex64]) -> Vec<Complex64> {
    framer.config().constellation.slice(soft)
}

fn decisions(framer: &Framer, d: &Detection) -> (Vec<Complex64>, Vec<Complex64>) {
    (
        slice_all(framer, &d.common_soft),
        slice_all(framer, &d.extra_soft),
    )
}

fn decide(
    framer: &Framer,
    common_soft: Vec<Complex64>,
    extra_soft: Vec<Complex64>,
    private_soft: &[Complex64],
) -> Detection {
    let c = &framer.config().constellation;
    let mut common_bits = c.demodulate(&common_soft);
    common_bits.extend(c.demodulate(&extra_soft));
    Detection {
        common_bits,
        private_bits: c.demodulate(private_soft),
        common_soft,
        extra_soft,
        private_soft: private_soft.to_vec(),
    }
}
