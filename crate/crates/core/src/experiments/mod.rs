//! Simulated measurement protocols: chevron scans, population traces, phase
//! scans, repeated-transfer fidelity decay and transferred-state decay.
//!
//! Every result type can write a CSV table; the summary types serialize with
//! serde.

mod chevron;
mod decay;
mod fit;
mod phase;
mod repeated;
mod trace;

pub use chevron::{chevron_scan, ChevronMap, ChevronMode, ChevronRequest, ChevronSummary};
pub use decay::{fit_decay_time, transferred_state_decay, DecayInput, StateDecay, DECAY_SENTINEL_US};
pub use phase::{
    phase_scan, predicted_phase, transfer_amplitude, transferred_phase, PhaseScan, MIN_TRANSFER_AMPLITUDE,
};
pub use repeated::{repeated_transfer, standard_counts, DecayFit, DECAY_FLOOR};
pub use trace::{lab_transfer_scores, qst_population_trace, PopulationTrace, TraceModel, TraceSummary};
