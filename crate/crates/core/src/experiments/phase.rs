use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::fit::linear_fit;
use crate::dynamics::propagator;
use crate::model::{build_effective_hamiltonian, resonant_couplings, ChainConfig, EffectiveOptions, TransferSchedule};
use crate::{Complex64, Error, Result};

/// Amplitudes below this carry no usable phase.
pub const MIN_TRANSFER_AMPLITUDE: f64 = 1e-6;

/// ⟨last excited|U(τ)|first excited⟩ of the effective model.
pub fn transfer_amplitude(chain: &ChainConfig, schedule: &TransferSchedule) -> Result<Complex64> {
    let h = build_effective_hamiltonian(chain, schedule, EffectiveOptions::default())?;
    let u = propagator(&h, schedule.duration)?;
    Ok(u[(chain.len(), 1)])
}

/// Phase of the transferred state, φ_s = arg ρ_ge on the last qubit, which
/// is −arg of the transfer amplitude.
pub fn transferred_phase(chain: &ChainConfig, schedule: &TransferSchedule) -> Result<f64> {
    let amp = transfer_amplitude(chain, schedule)?;
    if amp.norm() < MIN_TRANSFER_AMPLITUDE {
        return Err(Error::DegenerateAmplitude { magnitude: amp.norm() });
    }
    Ok(-amp.arg())
}

/// φ_s expected from the coupling phases alone for a mirror transfer:
/// Σ arg g′_j + (N−1)π/2, wrapped into (−π, π].
pub fn predicted_phase(chain: &ChainConfig, schedule: &TransferSchedule) -> Result<f64> {
    let couplings = resonant_couplings(chain, schedule, EffectiveOptions::default())?;
    let raw = couplings.iter().map(|c| c.arg()).sum::<f64>() + (chain.len() - 1) as f64 * FRAC_PI_2;
    Ok(wrap(raw))
}

fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseScan {
    /// Scanned modulation link (1-based).
    pub link: usize,
    pub phases: Vec<f64>,
    /// Unwrapped φ_s per scanned phase.
    pub transferred: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
}

impl PhaseScan {
    /// CSV with columns phi_in_rad, phi_s_rad.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "phi_in_rad,phi_s_rad")?;
        for (a, b) in self.phases.iter().zip(&self.transferred) {
            writeln!(out, "{a},{b:.12e}")?;
        }
        Ok(())
    }
}

/// Sweeps the modulation phase of `link` over `phases` and extracts φ_s for
/// each point from the effective model.
pub fn phase_scan(chain: &ChainConfig, schedule: &TransferSchedule, link: usize, phases: &[f64]) -> Result<PhaseScan> {
    if link == 0 || link > schedule.modulations.len() {
        return Err(Error::validation("link", format!("no modulation on link {link}")));
    }
    if phases.len() < 2 {
        return Err(Error::validation("phases", "need at least two scan points"));
    }
    let raw: Vec<f64> = phases
        .par_iter()
        .map(|&phi| {
            let mut s = schedule.clone();
            s.modulations[link - 1].phase = phi;
            s.refresh(chain)?;
            transferred_phase(chain, &s)
        })
        .collect::<Result<_>>()?;
    let mut transferred = Vec::with_capacity(raw.len());
    for (i, &v) in raw.iter().enumerate() {
        if i == 0 {
            transferred.push(v);
        } else {
            let prev: f64 = transferred[i - 1];
            transferred.push(prev + wrap(v - prev));
        }
    }
    let (slope, intercept) = linear_fit(phases, &transferred)?;
    Ok(PhaseScan {
        link,
        phases: phases.to_vec(),
        transferred,
        slope,
        intercept,
    })
}
