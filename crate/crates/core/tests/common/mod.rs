#![allow(dead_code)]

use qst_core::config::reference_chain;
use qst_core::coupling::{synthesize_schedule, CouplingTarget};
use qst_core::model::{ChainConfig, QuantumState, Representation, TransferSchedule};
use qst_core::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Default chain with the reference 84 ns schedule.
pub fn reference_pair() -> (ChainConfig, TransferSchedule) {
    let chain = reference_chain();
    let schedule = synthesize(&chain, 84.0, &[0.0; 3]);
    (chain, schedule)
}

pub fn synthesize(chain: &ChainConfig, tau: f64, phases: &[f64]) -> TransferSchedule {
    let target = CouplingTarget::from_duration(chain.len(), tau).unwrap();
    synthesize_schedule(chain, &target, phases).unwrap()
}

/// Chain whose detuning ladder is the reference one multiplied by `scale`.
pub fn scaled_chain(scale: f64) -> ChainConfig {
    let mut chain = reference_chain();
    let base: Vec<f64> = chain.qubits.iter().map(|q| q.operating_freq).collect();
    for j in 1..chain.len() {
        chain.qubits[j].operating_freq = base[0] + scale * (base[j] - base[0]);
    }
    chain
}

pub fn excited(n: usize, repr: Representation, qubit: usize) -> QuantumState {
    QuantumState::single_qubit(n, repr, qubit, c(0.0, 0.0), c(1.0, 0.0)).unwrap()
}

pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| start + (stop - start) * i as f64 / (n - 1) as f64).collect()
}
