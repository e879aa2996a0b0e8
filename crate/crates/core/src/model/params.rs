use serde::{Deserialize, Serialize};

use crate::units::ghz_to_rad_ns;
use crate::{Error, Result};

/// Recorded device parameters that the simulation never consumes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct DeviceRecord {
    /// GHz
    pub readout_freq: f64,
    /// µs, at the sweet spot
    pub sweet_spot_t1: f64,
    /// µs, at the sweet spot
    pub sweet_spot_t2_star: f64,
    /// µs, echo time at the sweet spot
    pub sweet_spot_t2e: f64,
    /// χ_qr/2π, MHz
    pub dispersive_shift: f64,
    /// κ_r/2π, MHz
    pub resonator_decay: f64,
}

/// One qubit of the chain. Frequencies in GHz, coherence times in µs at the
/// operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitParams {
    pub sweet_spot_freq: f64,
    pub operating_freq: f64,
    pub t1: f64,
    pub t2_star: f64,
    pub readout_fid_g: f64,
    pub readout_fid_e: f64,
    pub thermal_pop: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record: Option<DeviceRecord>,
}

impl QubitParams {
    pub fn validate(&self, path: &str) -> Result<()> {
        let field = |name: &str| format!("{path}.{name}");
        for (name, v) in [
            ("sweet_spot_freq", self.sweet_spot_freq),
            ("operating_freq", self.operating_freq),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::validation(field(name), format!("frequency must be positive, got {v}")));
            }
        }
        if !(self.t1.is_finite() && self.t1 > 0.0) {
            return Err(Error::validation(field("t1"), "must be positive"));
        }
        if !(self.t2_star.is_finite() && self.t2_star > 0.0) {
            return Err(Error::validation(field("t2_star"), "must be positive"));
        }
        if self.t2_star > 2.0 * self.t1 {
            return Err(Error::validation(
                field("t2_star"),
                format!("t2_star = {} exceeds 2·t1 = {}", self.t2_star, 2.0 * self.t1),
            ));
        }
        for (name, v) in [("readout_fid_g", self.readout_fid_g), ("readout_fid_e", self.readout_fid_e)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::validation(field(name), format!("must lie in [0, 1], got {v}")));
            }
        }
        if !(0.0..=0.5).contains(&self.thermal_pop) {
            return Err(Error::validation(
                field("thermal_pop"),
                format!("must lie in [0, 0.5], got {}", self.thermal_pop),
            ));
        }
        Ok(())
    }

    /// Pure-dephasing rate 1/tφ = 1/t2* − 1/(2 t1), in 1/µs.
    pub fn dephasing_rate(&self) -> f64 {
        1.0 / self.t2_star - 0.5 / self.t1
    }
}

/// Static description of a nearest-neighbour coupled chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub qubits: Vec<QubitParams>,
    /// g_j/2π in MHz between qubits j−1 and j, j = 1..N−1.
    pub static_couplings: Vec<f64>,
}

impl ChainConfig {
    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.qubits.len() < 2 {
            return Err(Error::validation("chain.qubits", "a chain needs at least two qubits"));
        }
        for (i, q) in self.qubits.iter().enumerate() {
            q.validate(&format!("chain.qubits[{i}]"))?;
        }
        let expected = self.qubits.len() - 1;
        if self.static_couplings.len() != expected {
            return Err(Error::validation(
                "chain.static_couplings",
                format!("expected {expected} couplings, found {}", self.static_couplings.len()),
            ));
        }
        for (i, &g) in self.static_couplings.iter().enumerate() {
            if !(g.is_finite() && g > 0.0) {
                return Err(Error::validation(
                    format!("chain.static_couplings[{i}]"),
                    format!("coupling must be positive, got {g}"),
                ));
            }
        }
        Ok(())
    }

    /// Operating frequencies ω_o,j in rad/ns.
    pub fn operating_angular(&self) -> Vec<f64> {
        self.qubits.iter().map(|q| ghz_to_rad_ns(q.operating_freq)).collect()
    }

    /// Δ_j = ω_o,j − ω_o,j−1 for j = 1..N−1, in MHz (f = ω/2π).
    pub fn detunings_mhz(&self) -> Vec<f64> {
        self.qubits
            .windows(2)
            .map(|w| (w[1].operating_freq - w[0].operating_freq) * 1e3)
            .collect()
    }

    /// Checks sign(Δ_j) = (−1)^{j+1}, the ordering the default resonance
    /// assignment ν_j = |Δ_j| relies on.
    pub fn check_alternating_detunings(&self) -> Result<()> {
        for (i, &d) in self.detunings_mhz().iter().enumerate() {
            let link = i + 1;
            let want_positive = link % 2 == 1;
            if d == 0.0 || (d > 0.0) != want_positive {
                return Err(Error::NonAlternatingDetuning { link, detuning_mhz: d });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::reference_chain;

    #[test]
    fn reference_chain_is_valid_and_alternating() {
        let chain = reference_chain();
        chain.validate().unwrap();
        chain.check_alternating_detunings().unwrap();
        let d = chain.detunings_mhz();
        assert!((d[0] - 284.8).abs() < 1e-9);
        assert!((d[1] + 203.3).abs() < 1e-9);
        assert!((d[2] - 274.7).abs() < 1e-9);
    }

    #[test]
    fn t2_star_beyond_twice_t1_is_rejected() {
        let mut chain = reference_chain();
        chain.qubits[1].t2_star = 2.0 * chain.qubits[1].t1 + 0.1;
        match chain.validate() {
            Err(Error::Validation { path, .. }) => assert_eq!(path, "chain.qubits[1].t2_star"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_coupling_reports_field_path() {
        let mut chain = reference_chain();
        chain.static_couplings.pop();
        match chain.validate() {
            Err(Error::Validation { path, .. }) => assert_eq!(path, "chain.static_couplings"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn thermal_population_bounds() {
        let mut chain = reference_chain();
        chain.qubits[0].thermal_pop = 0.6;
        assert!(chain.validate().is_err());
    }

    #[test]
    fn non_alternating_ladder_detected() {
        let mut chain = reference_chain();
        chain.qubits[2].operating_freq = 5.3;
        match chain.check_alternating_detunings() {
            Err(Error::NonAlternatingDetuning { link, .. }) => assert_eq!(link, 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
