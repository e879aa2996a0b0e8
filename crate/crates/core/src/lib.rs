//! Perfect quantum state transfer along chains of parametrically modulated
//! qubits.
//!
//! The crate is organised by concern:
//!
//! - [`model`]: chain parameters, modulation schedules, quantum states and the
//!   lab-frame / effective Hamiltonians.
//! - [`coupling`]: the Bessel-function coupling map, its inversion, schedule
//!   synthesis and Nelder-Mead refinement.
//! - [`dynamics`]: Schrödinger and Lindblad integration plus the exact
//!   matrix-exponential propagator.
//! - [`experiments`]: chevron scans, population traces, phase scans and
//!   repeated-transfer fidelity decay.
//! - [`tomography`]: readout confusion, state and process tomography.
//! - [`calibration`]: flux-crosstalk orthogonalization and flux-pulse
//!   deconvolution.
//! - [`config`]: the TOML configuration document and the bundled device
//!   defaults.
//!
//! Units: configuration documents carry qubit frequencies in GHz, couplings
//! and modulation parameters as `f = ω/2π` in MHz, schedule times in ns and
//! coherence times in µs. Internally everything is converted to angular
//! frequency in rad/ns and time in ns (see [`units`]).

// Range checks are written as `!(x > 0.0)` on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod calibration;
pub mod config;
pub mod coupling;
pub mod dynamics;
mod error;
pub mod experiments;
pub mod linalg;
pub mod model;
pub mod tomography;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64;
