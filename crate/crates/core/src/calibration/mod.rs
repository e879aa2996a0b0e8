//! Flux-crosstalk orthogonalization and flux-pulse deconvolution.

mod crosstalk;
mod deconvolution;
mod response;

pub use crosstalk::{apply_correction, orthogonalize, CrosstalkMatrix, MAX_CONDITION_NUMBER};
pub use deconvolution::{convolve, deconvolve, simulate_step_response, Deconvolution, StepResponse};
pub use response::{LineResponse, ParametricResponse};
