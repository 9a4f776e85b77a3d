//! Frequency up-conversion and amplification of infrared signals in a
//! molecular optomechanical cavity.
//!
//! A VIS cavity mode `a` is pumped, an IR mode `c` receives a weak signal,
//! and a collective molecular vibration `B` couples to both. The crate
//! computes the self-consistent steady state, the exact linear response of
//! the fluctuations at the Stokes and anti-Stokes lines, the conversion
//! efficiency `T_ac`, the stability of the linearized dynamics, and the
//! bandwidth of the conversion spectrum, plus sweeps over any parameter.
//!
//! See [`model::UNIT_NOTE`] for units.

pub mod analysis;
pub mod cli;
pub mod model;
pub mod numerics;
pub mod operating_point;
pub mod response;
pub mod stability;
pub mod steady_state;

pub use model::{DetuningMode, SystemParams, ValidatedParams};
pub use operating_point::OperatingPoint;
