use crate::linalg::CMatrix;
use crate::model::{
    build_effective_hamiltonian, resonant_couplings, xy_full_matrix, ChainConfig, ConstantHamiltonian,
    EffectiveOptions, Hamiltonian, LabHamiltonian, LabOptions, QuantumState, Representation, TransferSchedule,
};
use crate::{Error, Result};

use super::noise::NoiseModel;

/// Intervals needing more RK4 steps than this fail with `StepUnderflow`.
pub const MAX_STEPS_PER_INTERVAL: f64 = 1e9;

#[derive(Debug, Clone)]
pub enum HamiltonianSource {
    /// Parametrically modulated chain, applied matrix-free on the full register.
    Lab {
        chain: ChainConfig,
        schedule: TransferSchedule,
        options: LabOptions,
    },
    /// Resonant XY model; acts in the representation of the initial state.
    Effective {
        chain: ChainConfig,
        schedule: TransferSchedule,
        options: EffectiveOptions,
    },
    /// A fixed operator in rad/ns.
    Explicit(CMatrix),
    /// A modulated register built directly, e.g. a driven sub-chain.
    Modulated(LabHamiltonian),
}

impl HamiltonianSource {
    pub fn lab(chain: &ChainConfig, schedule: &TransferSchedule) -> Self {
        HamiltonianSource::Lab {
            chain: chain.clone(),
            schedule: schedule.clone(),
            options: LabOptions::default(),
        }
    }

    pub fn effective(chain: &ChainConfig, schedule: &TransferSchedule) -> Self {
        HamiltonianSource::Effective {
            chain: chain.clone(),
            schedule: schedule.clone(),
            options: EffectiveOptions::default(),
        }
    }

    /// Representation the generator acts on, given the caller's preference.
    pub(crate) fn representation(&self, preferred: Representation) -> Representation {
        match self {
            HamiltonianSource::Lab { .. } | HamiltonianSource::Modulated(_) => Representation::Full,
            _ => preferred,
        }
    }

    pub(crate) fn build(&self, representation: Representation) -> Result<Box<dyn Hamiltonian>> {
        Ok(match self {
            HamiltonianSource::Lab {
                chain,
                schedule,
                options,
            } => Box::new(LabHamiltonian::from_schedule(chain, schedule, *options)?),
            HamiltonianSource::Effective {
                chain,
                schedule,
                options,
            } => {
                let m = match representation {
                    Representation::Sector => build_effective_hamiltonian(chain, schedule, *options)?,
                    Representation::Full => xy_full_matrix(&resonant_couplings(chain, schedule, *options)?),
                };
                Box::new(ConstantHamiltonian::new(m)?)
            }
            HamiltonianSource::Explicit(m) => Box::new(ConstantHamiltonian::new(m.clone())?),
            HamiltonianSource::Modulated(h) => Box::new(h.clone()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    /// dt = step_factor / rate bound. Must not exceed 0.05.
    pub step_factor: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self { step_factor: 0.01 }
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionRequest {
    pub source: HamiltonianSource,
    pub initial: QuantumState,
    /// Sample times in ns: strictly increasing, starting at 0.
    pub times: Vec<f64>,
    pub noise: Option<NoiseModel>,
    pub options: IntegratorOptions,
}

impl EvolutionRequest {
    pub fn new(source: HamiltonianSource, initial: QuantumState, times: Vec<f64>) -> Self {
        Self {
            source,
            initial,
            times,
            noise: None,
            options: IntegratorOptions::default(),
        }
    }

    pub fn with_noise(mut self, noise: NoiseModel) -> Self {
        self.noise = Some(noise);
        self
    }

    pub fn with_options(mut self, options: IntegratorOptions) -> Self {
        self.options = options;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.times.first() != Some(&0.0) {
            return Err(Error::validation("times", "grid must start at 0"));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::validation("times", "grid must be strictly increasing and finite"));
        }
        if !(self.options.step_factor > 0.0 && self.options.step_factor <= 0.05) {
            return Err(Error::validation("options.step_factor", "must lie in (0, 0.05]"));
        }
        if let Some(noise) = &self.noise {
            noise.validate()?;
            if noise.qubits.len() != self.initial.n_qubits() {
                return Err(Error::DimensionMismatch {
                    expected: self.initial.n_qubits(),
                    actual: noise.qubits.len(),
                });
            }
        }
        self.initial.validate()
    }
}
