//! Readout errors, state tomography and single-qubit process tomography.
//!
//! Bloch vectors use the computational convention: z = P_g − P_e,
//! x = 2 Re ρ_ge, y = 2 Im ρ_eg, so ρ = (I + xX + yY + zZ)/2 with |g> as the
//! first basis vector.

mod process;
mod readout;
mod state;

pub use process::{
    process_fidelity, process_fidelity_raw, process_tomography, standard_inputs, ChiMatrix, Qubit2,
};
pub use readout::{correct_readout, correct_readout_clamped, sample_readout, ConfusionMatrix, ReadoutCounts};
pub use state::{
    basis_probabilities, simulate_state_tomography, state_tomography, Basis, BlochVector, StateEstimate,
    TomographyInput,
};
