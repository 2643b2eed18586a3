//! Link-level simulation of rate-splitting multiple access over a
//! superposed AFDM/OFDM waveform.
//!
//! Common data ride on an affine-domain chirp waveform and private data on
//! ordinary subcarriers. Because the chirp spreads each affine symbol over
//! one residue class of subcarriers only, a receiver can read both streams
//! from one frame without successive interference cancellation.
//!
//! * [`transforms`]: DFT and DAFT pairs and the affine/frequency spreading map
//! * [`framing`]: resource layout, pilots, power scaling, cyclic prefix
//! * [`channel`]: integer delay-Doppler tap channels and AWGN
//! * [`receiver`]: pilot estimation, equalization, stream detection
//! * [`baseline`]: conventional power-domain RSMA on OFDM
//! * [`harness`]: Monte Carlo sweeps, metrics, configuration and output

pub mod baseline;
pub mod channel;
pub mod constellation;
pub mod error;
pub mod frame;
pub mod framing;
pub mod harness;
pub mod receiver;
pub mod seed;
pub mod transforms;

pub use error::{Error, Result};
pub use frame::{ComplexFrame, Domain};
