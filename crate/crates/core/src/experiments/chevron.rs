use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{fit_sin_squared, parabola_vertex};
use crate::coupling::{bessel_j0, bessel_j1};
use crate::dynamics::{evolve_unitary, EvolutionRequest, HamiltonianSource, IntegratorOptions};
use crate::model::{ChainConfig, LabHamiltonian, LabOptions, ModulationSpec, QuantumState, Representation};
use crate::units::rad_ns_to_mhz;
use crate::{Complex64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ChevronMode {
    /// Only the downstream qubit of the pair is modulated.
    Single,
    /// The upstream qubit carries its own modulation as well.
    Both { upstream: ModulationSpec },
}

/// Chevron scan of link `link` (qubits link−1, link), run on the isolated
/// pair. Frequencies in MHz, times in ns.
#[derive(Debug, Clone)]
pub struct ChevronRequest {
    pub chain: ChainConfig,
    pub link: usize,
    pub amplitude: f64,
    pub phase: f64,
    pub frequencies: Vec<f64>,
    pub times: Vec<f64>,
    pub mode: ChevronMode,
    pub lab: LabOptions,
    pub integrator: IntegratorOptions,
}

impl ChevronRequest {
    /// Scan of `points` frequencies spanning ±`span` around |Δ_link|.
    pub fn centered(
        chain: &ChainConfig,
        link: usize,
        amplitude: f64,
        span: f64,
        points: usize,
        t_max: f64,
        samples: usize,
    ) -> Result<Self> {
        if link == 0 || link >= chain.len() {
            return Err(Error::validation("link", format!("link {link} outside the chain")));
        }
        if points < 3 || samples < 8 || !(span > 0.0) || !(t_max > 0.0) {
            return Err(Error::validation("grid", "need ≥ 3 frequencies, ≥ 8 samples, positive span and t_max"));
        }
        let center = chain.detunings_mhz()[link - 1].abs();
        let frequencies = (0..points)
            .map(|i| center - span + 2.0 * span * i as f64 / (points - 1) as f64)
            .collect();
        let times = (0..samples).map(|i| t_max * i as f64 / (samples - 1) as f64).collect();
        Ok(Self {
            chain: chain.clone(),
            link,
            amplitude,
            phase: 0.0,
            frequencies,
            times,
            mode: ChevronMode::Single,
            lab: LabOptions::default(),
            integrator: IntegratorOptions::default(),
        })
    }

    /// |g′| in MHz predicted by the Bessel map at resonance.
    pub fn analytic_coupling(&self, frequency: f64) -> Result<f64> {
        let g = self.chain.static_couplings[self.link - 1];
        let attenuation = match self.mode {
            ChevronMode::Single => 1.0,
            ChevronMode::Both { upstream } => bessel_j0(upstream.index())?,
        };
        Ok(g * bessel_j1(self.amplitude / frequency)?.abs() * attenuation.abs())
    }

    fn validate(&self) -> Result<()> {
        self.chain.validate()?;
        if self.link == 0 || self.link >= self.chain.len() {
            return Err(Error::validation("link", format!("link {} outside the chain", self.link)));
        }
        if self.frequencies.len() < 3 || self.frequencies.windows(2).any(|w| !(w[1] > w[0]) || w[0] <= 0.0) {
            return Err(Error::validation("frequencies", "need ≥ 3 positive, increasing frequencies"));
        }
        if !(self.amplitude >= 0.0) {
            return Err(Error::validation("amplitude", "must be non-negative"));
        }
        Ok(())
    }

    /// P_e(t) of the upstream qubit for one modulation frequency.
    fn column(&self, frequency: f64) -> Result<Vec<f64>> {
        let (a, b) = (self.link - 1, self.link);
        let operating = [self.chain.qubits[a].operating_freq, self.chain.qubits[b].operating_freq];
        let upstream = match self.mode {
            ChevronMode::Single => None,
            ChevronMode::Both { upstream } => Some(upstream),
        };
        let drive = ModulationSpec::new(self.amplitude, frequency, self.phase);
        let h = LabHamiltonian::new(&operating, &[self.chain.static_couplings[a]], &[upstream, Some(drive)], self.lab)?;
        let initial = QuantumState::single_qubit(2, Representation::Full, 0, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))?;
        let request = EvolutionRequest::new(HamiltonianSource::Modulated(h), initial, self.times.clone()).with_options(self.integrator);
        Ok(evolve_unitary(&request)?.population_of(0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChevronMap {
    pub frequencies: Vec<f64>,
    pub times: Vec<f64>,
    /// `excited[i][k]`: upstream P_e at `frequencies[i]`, `times[k]`.
    pub excited: Vec<Vec<f64>>,
    /// Fitted resonance ν* in MHz.
    pub resonance: f64,
    /// Fitted |g′| in MHz: the resonant P_e oscillates as cos²(|g′|t), i.e.
    /// at angular frequency 2|g′|.
    pub coupling: f64,
    /// Upstream P_e simulated at ν*.
    pub resonance_trace: Vec<f64>,
}

impl ChevronMap {
    /// Min-to-max span of the resonant oscillation.
    pub fn resonance_span(&self) -> f64 {
        let max = self.resonance_trace.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.resonance_trace.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }

    /// Time-averaged population that left the upstream qubit, per column.
    pub fn transferred_profile(&self) -> Vec<f64> {
        self.excited
            .iter()
            .map(|col| col.iter().map(|p| 1.0 - p).sum::<f64>() / col.len() as f64)
            .collect()
    }

    /// CSV with columns nu_mhz, time_ns, p_e_upstream.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "nu_mhz,time_ns,p_e_upstream")?;
        for (nu, col) in self.frequencies.iter().zip(&self.excited) {
            for (t, p) in self.times.iter().zip(col) {
                writeln!(out, "{nu},{t},{p:.12e}")?;
            }
        }
        Ok(())
    }
}

/// Simulates every frequency column in parallel, locates the resonance from
/// the Lorentzian profile of the time-averaged transfer, re-simulates at ν*
/// and fits the resonant trace to cos²(|g′|t).
pub fn chevron_scan(request: &ChevronRequest) -> Result<ChevronMap> {
    request.validate()?;
    let excited: Vec<Vec<f64>> = request
        .frequencies
        .par_iter()
        .map(|&nu| request.column(nu))
        .collect::<Result<_>>()?;

    let mut map = ChevronMap {
        frequencies: request.frequencies.clone(),
        times: request.times.clone(),
        excited,
        resonance: f64::NAN,
        coupling: f64::NAN,
        resonance_trace: Vec::new(),
    };
    let profile = map.transferred_profile();
    let (best, peak) = profile
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    if !(peak > 0.02) {
        return Err(Error::FitFailure("no excitation exchange anywhere on the grid".into()));
    }

    // The time-averaged transfer is Lorentzian in the detuning, so its
    // reciprocal is a parabola around ν*.
    let lo = best.saturating_sub(2);
    let hi = (best + 3).min(profile.len());
    let xs = &map.frequencies[lo..hi];
    let ys: Vec<f64> = profile[lo..hi].iter().map(|p| 1.0 / p.max(1e-12)).collect();
    let first = map.frequencies[0];
    let last = *map.frequencies.last().unwrap();
    map.resonance = match parabola_vertex(xs, &ys) {
        Some(v) if v >= xs[0] && v <= xs[xs.len() - 1] => v,
        _ => map.frequencies[best],
    }
    .clamp(first, last);

    map.resonance_trace = request.column(map.resonance)?;
    let transferred: Vec<f64> = map.resonance_trace.iter().map(|p| 1.0 - p).collect();
    let dt = map.times[1] - map.times[0];
    let (amplitude, omega) = fit_sin_squared(&map.times, &transferred, 0.5 * std::f64::consts::PI / dt)?;
    let span = map.times[map.times.len() - 1] - map.times[0];
    if amplitude < 0.05 || omega * span < std::f64::consts::PI {
        return Err(Error::FitFailure(format!(
            "fewer than one full oscillation on the grid (amplitude {amplitude:.3}, Ω·T = {:.3})",
            omega * span
        )));
    }
    // Residual detuning lowers the amplitude to g′²/Ω² and raises Ω.
    map.coupling = rad_ns_to_mhz(omega * amplitude.min(1.0).sqrt());
    Ok(map)
}

/// Fitted chevron parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChevronSummary {
    pub resonance_mhz: f64,
    pub coupling_mhz: f64,
    pub resonance_span: f64,
}

impl ChevronMap {
    pub fn summary(&self) -> ChevronSummary {
        ChevronSummary {
            resonance_mhz: self.resonance,
            coupling_mhz: self.coupling,
            resonance_span: self.resonance_span(),
        }
    }
}
