use serde::Serialize;

use crate::dynamics::{evolve, EvolutionRequest, HamiltonianSource, IntegratorOptions, NoiseModel, Trajectory};
use crate::model::{ChainConfig, LabOptions, QuantumState, Representation, TransferSchedule};
use crate::{Complex64, Result};

/// Which generator drives a population trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TraceModel {
    Lab,
    Effective,
}

#[derive(Debug, Clone)]
pub struct PopulationTrace {
    pub trajectory: Trajectory,
    /// First grid time at which P_e of the last qubit is maximal.
    pub transfer_time: f64,
    pub transfer_population: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceSummary {
    pub transfer_time_ns: f64,
    pub transfer_population: f64,
    pub max_norm_drift: f64,
}

impl PopulationTrace {
    pub fn summary(&self) -> TraceSummary {
        TraceSummary {
            transfer_time_ns: self.transfer_time,
            transfer_population: self.transfer_population,
            max_norm_drift: self.trajectory.max_norm_drift(),
        }
    }
}

/// Evolves α|g>+β|e> prepared on qubit 0 (everything else in |g>) and
/// records every qubit's P_e on `times`.
pub fn qst_population_trace(
    chain: &ChainConfig,
    schedule: &TransferSchedule,
    model: TraceModel,
    amplitudes: (Complex64, Complex64),
    times: Vec<f64>,
    noise: Option<NoiseModel>,
    options: IntegratorOptions,
) -> Result<PopulationTrace> {
    schedule.validate_against(chain)?;
    let n = chain.len();
    let (source, representation) = match model {
        TraceModel::Lab => (HamiltonianSource::lab(chain, schedule), Representation::Full),
        TraceModel::Effective => (HamiltonianSource::effective(chain, schedule), Representation::Sector),
    };
    let initial = QuantumState::single_qubit(n, representation, 0, amplitudes.0, amplitudes.1)?;
    let mut request = EvolutionRequest::new(source, initial, times).with_options(options);
    if let Some(noise) = noise {
        request = request.with_noise(noise);
    }
    let trajectory = evolve(&request)?;
    let last = trajectory.population_of(n - 1);
    let (index, transfer_population) = last
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, p)| if p > acc.1 { (i, p) } else { acc });
    Ok(PopulationTrace {
        transfer_time: trajectory.times[index],
        transfer_population,
        trajectory,
    })
}

/// Lab-frame score of a schedule: P_e of the last qubit at τ and of qubit 0
/// back home at 2τ, starting from |e> on qubit 0.
pub fn lab_transfer_scores(
    chain: &ChainConfig,
    schedule: &TransferSchedule,
    lab: LabOptions,
    options: IntegratorOptions,
) -> Result<(f64, f64)> {
    let n = chain.len();
    let tau = schedule.duration;
    let source = HamiltonianSource::Lab {
        chain: chain.clone(),
        schedule: schedule.clone(),
        options: lab,
    };
    let initial = QuantumState::single_qubit(n, Representation::Full, 0, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))?;
    let trajectory = evolve(&EvolutionRequest::new(source, initial, vec![0.0, tau, 2.0 * tau]).with_options(options))?;
    Ok((trajectory.populations[1][n - 1], trajectory.populations[2][0]))
}
