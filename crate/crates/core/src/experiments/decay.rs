use std::f64::consts::FRAC_1_SQRT_2;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::fit::linear_fit;
use crate::dynamics::{evolve, EvolutionRequest, HamiltonianSource, IntegratorOptions, NoiseModel};
use crate::model::{ChainConfig, QuantumState, Representation, TransferSchedule};
use crate::units::ns_to_us;
use crate::{Complex64, Error, Result};

/// Reported decay time (µs) when the transferred component does not decay.
pub const DECAY_SENTINEL_US: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecayInput {
    /// |e>: the tracked component is the landing qubit's P_e.
    Excited,
    /// (|g>+|e>)/√2: the tracked component is 2|ρ_ge| on the landing qubit.
    Superposition,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateDecay {
    pub input: DecayInput,
    /// Odd transfer counts sampled; the state then sits on the last qubit.
    pub counts: Vec<u32>,
    pub times: Vec<f64>,
    pub components: Vec<f64>,
    /// Exponential decay time in µs, or `DECAY_SENTINEL_US`.
    pub decay_time: f64,
}

impl StateDecay {
    /// CSV with columns m, time_ns, component.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "m,time_ns,component")?;
        for ((m, t), c) in self.counts.iter().zip(&self.times).zip(&self.components) {
            writeln!(out, "{m},{t},{c:.12e}")?;
        }
        Ok(())
    }
}

/// Decay time from a log-linear fit of `components` against `times` (ns).
pub fn fit_decay_time(times: &[f64], components: &[f64]) -> Result<f64> {
    if components.iter().any(|&c| !(c > 0.0)) {
        return Err(Error::FitFailure("transferred component vanished".into()));
    }
    let logs: Vec<f64> = components.iter().map(|c| c.ln()).collect();
    let (slope, _) = linear_fit(times, &logs)?;
    // Flat up to round-off counts as no decay.
    if slope > -1e-12 {
        return Ok(DECAY_SENTINEL_US);
    }
    Ok(ns_to_us(-1.0 / slope).min(DECAY_SENTINEL_US))
}

/// Follows one input through repeated transfers on the effective model and
/// fits the exponential decay of its transferred component. `counts` must be
/// odd so every sample lands on the last qubit.
pub fn transferred_state_decay(
    chain: &ChainConfig,
    schedule: &TransferSchedule,
    input: DecayInput,
    counts: &[u32],
    noise: Option<&NoiseModel>,
    options: IntegratorOptions,
) -> Result<StateDecay> {
    schedule.validate_against(chain)?;
    if counts.len() < 2 || counts.iter().any(|m| m % 2 == 0) || counts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::validation("counts", "need at least two increasing odd transfer counts"));
    }
    let n = chain.len();
    let (alpha, beta) = match input {
        DecayInput::Excited => (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
        DecayInput::Superposition => (Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(FRAC_1_SQRT_2, 0.0)),
    };
    let representation = if noise.is_some() {
        Representation::Full
    } else {
        Representation::Sector
    };
    let initial = QuantumState::single_qubit(n, representation, 0, alpha, beta)?;
    let mut times = vec![0.0];
    times.extend(counts.iter().map(|&m| m as f64 * schedule.duration));
    let mut request =
        EvolutionRequest::new(HamiltonianSource::effective(chain, schedule), initial, times).with_options(options);
    if let Some(noise) = noise {
        request = request.with_noise(noise.clone());
    }
    let trajectory = evolve(&request)?;
    let components: Vec<f64> = trajectory.states[1..]
        .iter()
        .map(|s| {
            let rho = s.reduced_qubit(n - 1);
            match input {
                DecayInput::Excited => rho[(1, 1)].re,
                DecayInput::Superposition => 2.0 * rho[(0, 1)].norm(),
            }
        })
        .collect();
    let times = trajectory.times[1..].to_vec();
    let decay_time = fit_decay_time(&times, &components)?;
    Ok(StateDecay {
        input,
        counts: counts.to_vec(),
        times,
        components,
        decay_time,
    })
}
