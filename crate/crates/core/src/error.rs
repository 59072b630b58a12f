use thiserror::Error;

use crate::spin::HalfInt;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("photon number must be at least {min}, got {n}")]
    TooFewPhotons { n: u32, min: u32 },

    #[error("photon number {n} exceeds the supported maximum {max}")]
    TooManyPhotons { n: u32, max: u32 },

    #[error("loss must be >= 0, got {0}")]
    NegativeLoss(f64),

    #[error("loss must be < 1, got {0}")]
    LossTooLarge(f64),

    #[error("loss must be finite")]
    NonFiniteLoss,

    #[error("index {index} lies outside [-{j}, {j}]")]
    IndexOutOfRange { index: HalfInt, j: HalfInt },

    #[error("index {index} is not congruent to j = {j} modulo 1")]
    IndexParity { index: HalfInt, j: HalfInt },

    #[error("total spin must be non-negative, got {0}")]
    NegativeSpin(HalfInt),

    #[error("rotation angle {0} is not finite")]
    NonFiniteAngle(f64),

    #[error("expected {expected} amplitudes, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("state is not normalized: squared norm {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("amplitude at position {0} is not finite")]
    NonFiniteAmplitude(usize),

    #[error("sharpness {0} outside [0, 1]")]
    InvalidSharpness(f64),

    #[error("{what} requires at least {min} phase samples, got {got}")]
    TooFewSamples { what: &'static str, min: usize, got: usize },

    #[error("invalid scan range {lo}:{hi}")]
    InvalidRange { lo: u32, hi: u32 },

    #[error("malformed loss grid: {0}")]
    MalformedGrid(String),

    #[error("numerical overflow evaluating {0}")]
    Overflow(&'static str),

    #[error("malformed density block: {0}")]
    MalformedBlock(String),
}

pub type Result<T> = std::result::Result<T, Error>;
