use std::io::Write;

use nalgebra::Matrix2;
use rayon::prelude::*;
use serde::Serialize;

use super::fit::scan_minimum;
use crate::dynamics::{evolve, propagator, EvolutionRequest, HamiltonianSource, IntegratorOptions, NoiseModel};
use crate::linalg::{product_density, ONE, ZERO};
use crate::model::{
    build_effective_hamiltonian, ChainConfig, EffectiveOptions, QuantumState, Representation, StateData,
    TransferSchedule,
};
use crate::tomography::{process_fidelity, process_tomography, standard_inputs, ChiMatrix, Qubit2};
use crate::{Complex64, Error, Result};

/// Fixed floor of the fidelity-decay model, the fidelity of a fully
/// depolarizing single-qubit process.
pub const DECAY_FLOOR: f64 = 0.25;

/// Least-squares fit of F(m) = A·P^m + 0.25.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub counts: Vec<u32>,
    pub fidelities: Vec<f64>,
    pub amplitude: f64,
    pub amplitude_error: f64,
    /// Per-transfer fidelity P.
    pub per_transfer: f64,
    pub per_transfer_error: f64,
    pub residual_norm: f64,
}

impl DecayFit {
    pub fn fit(counts: &[u32], fidelities: &[f64]) -> Result<Self> {
        if counts.len() != fidelities.len() || counts.len() < 2 {
            return Err(Error::FitFailure("decay fit needs at least two (m, F) pairs".into()));
        }
        if fidelities.iter().any(|f| !f.is_finite()) {
            return Err(Error::FitFailure("non-finite fidelity".into()));
        }
        let m: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        let y: Vec<f64> = fidelities.iter().map(|f| f - DECAY_FLOOR).collect();
        // For fixed P the amplitude is linear.
        let amplitude_for = |p: f64| {
            let basis: Vec<f64> = m.iter().map(|&k| p.powf(k)).collect();
            let ss: f64 = basis.iter().map(|b| b * b).sum();
            let a = if ss > 0.0 {
                basis.iter().zip(&y).map(|(b, v)| b * v).sum::<f64>() / ss
            } else {
                0.0
            };
            let rss: f64 = basis.iter().zip(&y).map(|(b, v)| (v - a * b).powi(2)).sum();
            (a, rss)
        };
        let p = scan_minimum(|p| amplitude_for(p).1, 1e-6, 1.0, 2000, 1e-12);
        let (a, rss) = amplitude_for(p);
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::FitFailure(format!("fit diverged: amplitude {a}")));
        }

        // Gauss-Newton covariance around the optimum.
        let mut jtj = nalgebra::Matrix2::<f64>::zeros();
        for &k in &m {
            let row = nalgebra::Vector2::new(p.powf(k), a * k * p.powf(k - 1.0));
            jtj += row * row.transpose();
        }
        let dof = (m.len() as f64 - 2.0).max(1.0);
        let (amplitude_error, per_transfer_error) = match jtj.try_inverse() {
            Some(cov) => {
                let s2 = rss / dof;
                ((s2 * cov[(0, 0)]).max(0.0).sqrt(), (s2 * cov[(1, 1)]).max(0.0).sqrt())
            }
            None => (f64::NAN, f64::NAN),
        };
        Ok(Self {
            counts: counts.to_vec(),
            fidelities: fidelities.to_vec(),
            amplitude: a,
            amplitude_error,
            per_transfer: p,
            per_transfer_error,
            residual_norm: rss.sqrt(),
        })
    }

    pub fn model(&self, m: f64) -> f64 {
        self.amplitude * self.per_transfer.powf(m) + DECAY_FLOOR
    }

    /// CSV with columns m, fidelity, fit.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "m,fidelity,fit")?;
        for (&m, f) in self.counts.iter().zip(&self.fidelities) {
            writeln!(out, "{m},{f:.12e},{:.12e}", self.model(m as f64))?;
        }
        Ok(())
    }
}

/// Transfer counts 1, 5, 9, … up to `max`.
pub fn standard_counts(max: u32) -> Vec<u32> {
    (0..).map(|n| 4 * n + 1).take_while(|&m| m <= max).collect()
}

/// Inputs on qubit 0; the other qubits start in |g>, or in their thermal
/// mixture when the noise model has thermal channels.
fn initial_state(n: usize, input: &Qubit2, noise: Option<&NoiseModel>) -> Result<QuantumState> {
    let mut factors = vec![*input];
    for q in 1..n {
        let p = noise.map_or(0.0, |nm| nm.qubits[q].thermal_pop);
        factors.push(Matrix2::new(Complex64::new(1.0 - p, 0.0), ZERO, ZERO, Complex64::new(p, 0.0)));
    }
    QuantumState::new(n, Representation::Full, StateData::Mixed(product_density(&factors)))
}

/// Where the excitation sits after `m` transfers and the virtual-Z phase
/// that undoes the noiseless transfer phase there.
fn landing(chain: &ChainConfig, sector: &crate::linalg::CMatrix, tau: f64, m: u32) -> Result<(usize, Complex64)> {
    let n = chain.len();
    let target = if m % 2 == 1 { n - 1 } else { 0 };
    let u = propagator(sector, m as f64 * tau)?;
    let amp = u[(target + 1, 1)];
    if amp.norm() < 1e-6 {
        return Err(Error::DegenerateAmplitude { magnitude: amp.norm() });
    }
    Ok((target, Complex64::from_polar(1.0, -amp.arg())))
}

/// Repeated transfers under the master equation with the effective model.
///
/// Each standard input is evolved continuously for m·τ; the landing
/// qubit's reduced state is phase-corrected by a virtual Z calibrated on the
/// noiseless propagator, and the four input/output pairs are turned into a
/// process fidelity against the identity.
pub fn repeated_transfer(
    chain: &ChainConfig,
    schedule: &TransferSchedule,
    counts: &[u32],
    noise: Option<&NoiseModel>,
    options: IntegratorOptions,
) -> Result<DecayFit> {
    schedule.validate_against(chain)?;
    if counts.is_empty() || counts.contains(&0) || counts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::validation("counts", "transfer counts must be positive and increasing"));
    }
    let n = chain.len();
    let tau = schedule.duration;
    let sector = build_effective_hamiltonian(chain, schedule, EffectiveOptions::default())?;
    let landings: Vec<(usize, Complex64)> = counts.iter().map(|&m| landing(chain, &sector, tau, m)).collect::<Result<_>>()?;

    let mut times = vec![0.0];
    times.extend(counts.iter().map(|&m| m as f64 * tau));
    let inputs = standard_inputs();
    let outputs: Vec<Vec<Qubit2>> = inputs
        .par_iter()
        .map(|input| {
            let initial = initial_state(n, input, noise)?;
            let mut request =
                EvolutionRequest::new(HamiltonianSource::effective(chain, schedule), initial, times.clone())
                    .with_options(options);
            if let Some(noise) = noise {
                request = request.with_noise(noise.clone());
            }
            let trajectory = evolve(&request)?;
            Ok(trajectory.states[1..]
                .iter()
                .zip(&landings)
                .map(|(state, &(qubit, phase))| {
                    let rho = state.reduced_qubit(qubit);
                    let r = Matrix2::new(ONE, ZERO, ZERO, phase);
                    r * rho * r.adjoint()
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    let ideal = ChiMatrix::identity();
    let fidelities: Vec<f64> = (0..counts.len())
        .map(|k| {
            let pairs: Vec<(Qubit2, Qubit2)> = inputs.iter().zip(&outputs).map(|(i, o)| (*i, o[k])).collect();
            process_fidelity(&process_tomography(&pairs)?, &ideal)
        })
        .collect::<Result<_>>()?;
    DecayFit::fit(counts, &fidelities)
}
