use thiserror::Error;

use crate::frame::Domain;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid length: expected {expected}, got {got}")]
    InvalidLength { expected: usize, got: usize },

    #[error("index {index} out of range for length {len}")]
    InvalidIndex { index: usize, len: usize },

    #[error("frame is in the {got:?} domain, expected {expected:?}")]
    DomainMismatch { expected: Domain, got: Domain },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error(
        "channel has Doppler taps; a frequency response is only defined for delay-only channels"
    )]
    DopplerPresent,

    #[error("pilot subcarriers carry data in this frame layout; estimate in the affine domain")]
    PilotContaminated,

    #[error("pilot image vanishes on subcarrier {0}")]
    DegeneratePilot(usize),

    #[error("delay spread {max_delay} aliases on {pilots} comb pilots")]
    DelayAliasing { max_delay: usize, pilots: usize },

    #[error("pilot shift {shift} falls outside guard {guard}")]
    GuardViolation { shift: usize, guard: usize },

    #[error("Doppler span {max_doppler} is not resolvable with c1' = {c1_prime}")]
    UnresolvableDoppler { max_doppler: usize, c1_prime: usize },

    #[error("channel is singular at bin {0}")]
    SingularChannel(usize),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
