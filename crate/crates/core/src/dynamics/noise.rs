use serde::{Deserialize, Serialize};

use crate::model::ChainConfig;
use crate::units::us_to_ns;
use crate::{Error, Result};

/// Decoherence of one qubit. Times in µs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitNoise {
    pub t1: f64,
    pub t2_star: f64,
    /// Steady-state excited population of the thermal channel; 0 disables it.
    pub thermal_pop: f64,
}

impl QubitNoise {
    /// Energy relaxation rate 1/t1 in 1/ns.
    pub fn relaxation_rate(&self) -> f64 {
        1.0 / us_to_ns(self.t1)
    }

    /// Pure dephasing rate 1/tφ = 1/t2* − 1/(2 t1) in 1/ns.
    pub fn dephasing_rate(&self) -> f64 {
        1.0 / us_to_ns(self.t2_star) - 0.5 / us_to_ns(self.t1)
    }

    /// Upward jump rate p/(1−p)/t1 in 1/ns.
    pub fn excitation_rate(&self) -> f64 {
        self.thermal_pop / (1.0 - self.thermal_pop) * self.relaxation_rate()
    }
}

/// Per-qubit Markovian noise for the master equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub qubits: Vec<QubitNoise>,
}

impl NoiseModel {
    /// Operating-point coherence of `chain`; thermal channels only when
    /// `thermal` is set.
    pub fn from_chain(chain: &ChainConfig, thermal: bool) -> Self {
        Self {
            qubits: chain
                .qubits
                .iter()
                .map(|q| QubitNoise {
                    t1: q.t1,
                    t2_star: q.t2_star,
                    thermal_pop: if thermal { q.thermal_pop } else { 0.0 },
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (qubit, q) in self.qubits.iter().enumerate() {
            let bad = |message: String| Err(Error::UnphysicalRates { qubit, message });
            if !(q.t1.is_finite() && q.t1 > 0.0) {
                return bad(format!("t1 = {} must be positive", q.t1));
            }
            if !(q.t2_star.is_finite() && q.t2_star > 0.0) {
                return bad(format!("t2_star = {} must be positive", q.t2_star));
            }
            if q.dephasing_rate() < -1e-15 {
                return bad(format!("t2_star = {} exceeds 2·t1 = {}", q.t2_star, 2.0 * q.t1));
            }
            if !(0.0..1.0).contains(&q.thermal_pop) {
                return bad(format!("thermal population {} outside [0, 1)", q.thermal_pop));
            }
        }
        Ok(())
    }

    /// Sum of all dissipative rates, 1/ns.
    pub fn total_rate(&self) -> f64 {
        self.qubits
            .iter()
            .map(|q| q.relaxation_rate() + q.dephasing_rate().max(0.0) + q.excitation_rate())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rates_compose_to_t2_star() {
        let q = QubitNoise {
            t1: 17.5,
            t2_star: 6.1,
            thermal_pop: 0.0,
        };
        let total = 0.5 * q.relaxation_rate() + q.dephasing_rate();
        assert!((total - 1.0 / 6100.0).abs() < 1e-15);
    }

    #[test]
    fn unphysical_t2_rejected() {
        let m = NoiseModel {
            qubits: vec![QubitNoise {
                t1: 10.0,
                t2_star: 20.5,
                thermal_pop: 0.0,
            }],
        };
        assert!(matches!(m.validate(), Err(Error::UnphysicalRates { qubit: 0, .. })));
    }
}
