use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coupling::effective_coupling;
use crate::model::ChainConfig;
use crate::units::mhz_to_rad_ns;
use crate::{Error, Result};

/// Sinusoidal frequency modulation ω_j(t) = ω_o,j + ε sin(ν t + φ).
///
/// `amplitude` and `frequency` are ε/2π and ν/2π in MHz; `phase` in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationSpec {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

impl ModulationSpec {
    pub fn new(amplitude: f64, frequency: f64, phase: f64) -> Self {
        Self {
            amplitude,
            frequency,
            phase,
        }
    }

    /// Modulation index α = ε/ν. Always derived, never stored.
    pub fn index(&self) -> f64 {
        self.amplitude / self.frequency
    }

    pub fn amplitude_rad_ns(&self) -> f64 {
        mhz_to_rad_ns(self.amplitude)
    }

    pub fn frequency_rad_ns(&self) -> f64 {
        mhz_to_rad_ns(self.frequency)
    }

    /// Frequency excursion ε sin(ν t + φ) in rad/ns at time `t` (ns).
    pub fn excursion(&self, t: f64) -> f64 {
        self.amplitude_rad_ns() * (self.frequency_rad_ns() * t + self.phase).sin()
    }

    pub fn validate(&self, path: &str) -> Result<()> {
        if !(self.frequency.is_finite() && self.frequency > 0.0) {
            return Err(Error::validation(format!("{path}.frequency"), "must be positive"));
        }
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(Error::validation(format!("{path}.amplitude"), "must be non-negative"));
        }
        if !self.phase.is_finite() {
            return Err(Error::validation(format!("{path}.phase"), "must be finite"));
        }
        Ok(())
    }
}

/// Modulations for qubits 1..N−1 (qubit 0 is never modulated), the transfer
/// time τ in ns and the cached effective couplings g′_j/2π in MHz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferSchedule {
    pub modulations: Vec<ModulationSpec>,
    pub duration: f64,
    pub effective_couplings: Vec<Complex64>,
}

impl TransferSchedule {
    /// Builds a schedule and fills the coupling cache from the Bessel map.
    pub fn new(chain: &ChainConfig, modulations: Vec<ModulationSpec>, duration: f64) -> Result<Self> {
        let mut schedule = Self {
            modulations,
            duration,
            effective_couplings: Vec::new(),
        };
        schedule.check_shape(chain)?;
        schedule.effective_couplings = schedule.compute_couplings(chain)?;
        Ok(schedule)
    }

    fn check_shape(&self, chain: &ChainConfig) -> Result<()> {
        let expected = chain.len().saturating_sub(1);
        if self.modulations.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: self.modulations.len(),
            });
        }
        for (i, m) in self.modulations.iter().enumerate() {
            m.validate(&format!("schedule.modulations[{i}]"))?;
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::validation("schedule.duration", "must be positive"));
        }
        Ok(())
    }

    /// Modulation indices α_1..α_{N−1}.
    pub fn indices(&self) -> Vec<f64> {
        self.modulations.iter().map(ModulationSpec::index).collect()
    }

    /// Effective couplings recomputed from the current modulation parameters.
    pub fn compute_couplings(&self, chain: &ChainConfig) -> Result<Vec<Complex64>> {
        let alphas = self.indices();
        (1..chain.len())
            .map(|link| {
                let upstream = if link == 1 { None } else { Some(alphas[link - 2]) };
                effective_coupling(
                    link,
                    chain.static_couplings[link - 1],
                    upstream,
                    alphas[link - 1],
                    self.modulations[link - 1].phase,
                )
            })
            .collect()
    }

    /// Refreshes the coupling cache after the modulations were edited.
    pub fn refresh(&mut self, chain: &ChainConfig) -> Result<()> {
        self.check_shape(chain)?;
        self.effective_couplings = self.compute_couplings(chain)?;
        Ok(())
    }

    /// Checks shape, parameter ranges and that the coupling cache is current.
    pub fn validate_against(&self, chain: &ChainConfig) -> Result<()> {
        self.check_shape(chain)?;
        let fresh = self.compute_couplings(chain)?;
        if self.effective_couplings.len() != fresh.len() {
            return Err(Error::validation(
                "schedule.effective_couplings",
                format!("expected {} entries, found {}", fresh.len(), self.effective_couplings.len()),
            ));
        }
        for (i, (cached, fresh)) in self.effective_couplings.iter().zip(&fresh).enumerate() {
            let scale = fresh.norm().max(1e-300);
            if (cached.norm() - fresh.norm()).abs() > 1e-12 * scale.max(1.0) {
                return Err(Error::validation(
                    format!("schedule.effective_couplings[{i}]"),
                    format!("stale cache: {} vs recomputed {}", cached.norm(), fresh.norm()),
                ));
            }
        }
        Ok(())
    }

    /// |g′_j| = |g′_{N−j}| within `rel_tol`.
    pub fn is_mirror_symmetric(&self, rel_tol: f64) -> bool {
        let mags: Vec<f64> = self.effective_couplings.iter().map(|c| c.norm()).collect();
        let n = mags.len();
        (0..n).all(|i| {
            let (a, b) = (mags[i], mags[n - 1 - i]);
            (a - b).abs() <= rel_tol * a.max(b).max(f64::MIN_POSITIVE)
        })
    }
}
