//! Domain types and Hamiltonian construction.

mod hamiltonian;
mod params;
mod schedule;
mod state;

pub use hamiltonian::{
    build_effective_hamiltonian, build_lab_hamiltonian, resonant_couplings, sector_to_full_operator, xy_full_matrix,
    xy_sector_matrix, ConstantHamiltonian,
    EffectiveOptions, Frame, Hamiltonian, LabHamiltonian, LabOptions, QubitDrive,
    DEFAULT_RESONANCE_TOLERANCE_MHZ,
};
pub use params::{ChainConfig, DeviceRecord, QubitParams};
pub use schedule::{ModulationSpec, TransferSchedule};
pub use state::{QuantumState, Representation, StateData};
