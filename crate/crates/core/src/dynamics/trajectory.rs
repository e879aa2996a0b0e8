use std::io::Write;

use crate::model::QuantumState;
use crate::Result;

/// States and per-qubit excited populations on a time grid (ns).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<QuantumState>,
    /// `populations[i][q]` is P_e of qubit q at `times[i]`.
    pub populations: Vec<Vec<f64>>,
}

impl Trajectory {
    pub(crate) fn from_states(times: Vec<f64>, states: Vec<QuantumState>) -> Self {
        let populations = states.iter().map(QuantumState::populations).collect();
        Self {
            times,
            states,
            populations,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.states.first().map_or(0, QuantumState::n_qubits)
    }

    pub fn final_state(&self) -> &QuantumState {
        self.states.last().expect("trajectories hold at least one sample")
    }

    /// P_e of one qubit over the grid.
    pub fn population_of(&self, qubit: usize) -> Vec<f64> {
        self.populations.iter().map(|p| p[qubit]).collect()
    }

    /// Largest |norm_or_trace − 1| over the grid.
    pub fn max_norm_drift(&self) -> f64 {
        self.states
            .iter()
            .map(|s| (s.norm_or_trace() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with columns time_ns, p_e_q0..p_e_q{N−1}, norm_or_trace.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let n = self.n_qubits();
        let mut header = vec!["time_ns".to_string()];
        header.extend((0..n).map(|q| format!("p_e_q{q}")));
        header.push("norm_or_trace".into());
        writeln!(out, "{}", header.join(","))?;
        for ((t, p), s) in self.times.iter().zip(&self.populations).zip(&self.states) {
            let mut row = vec![format!("{t}")];
            row.extend(p.iter().map(|v| format!("{v:.12e}")));
            row.push(format!("{:.12e}", s.norm_or_trace()));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}
