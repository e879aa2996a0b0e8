//! Time evolution: fixed-step Schrödinger and Lindblad integration, and the
//! exact propagator used as an oracle for time-independent generators.

mod exact;
mod integrate;
mod noise;
mod request;
mod trajectory;

pub use exact::{evolve_exact, propagator};
pub use integrate::{evolve, evolve_lindblad, evolve_unitary};
pub use noise::{NoiseModel, QubitNoise};
pub use request::{EvolutionRequest, HamiltonianSource, IntegratorOptions, MAX_STEPS_PER_INTERVAL};
pub use trajectory::Trajectory;
