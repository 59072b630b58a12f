//! Canonical phase measurement of the optimal two-mode input state when
//! photons leak out of one interferometer arm.
//!
//! The pipeline runs from the optimal amplitudes ([`optimal_state`]) through
//! the loss beam splitter and partial trace ([`loss_channel`]) to the phase
//! distribution, sharpness and Holevo variance ([`povm`]), and finally to
//! photon-number sweeps ([`sweep`]).

pub mod error;
pub mod loss_channel;
pub mod optimal_state;
pub mod povm;
pub mod spin;
pub mod sweep;
pub mod wigner;

#[cfg(any(test, feature = "oracle"))]
pub mod oracle;
#[cfg(any(test, feature = "oracle"))]
pub mod validate;

pub use error::{Error, Result};
pub use loss_channel::{LossChannel, PureLossyState, ReducedDensity};
pub use optimal_state::AmplitudeVector;
pub use povm::{PhaseDistribution, PhaseEstimate, SharpnessMode};
pub use spin::{HalfInt, SpinRange};
pub use sweep::{CurvePoint, ScanOutcome, SweepResult};
