use serde::{Deserialize, Serialize};

use super::nelder_mead::{nelder_mead, NelderMeadOptions};
use crate::model::{ChainConfig, ModulationSpec, TransferSchedule};
use crate::{Error, Result};

/// Box constraints for refinement, as fractions of the starting values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefineBounds {
    /// ε may move within ±`amplitude_fraction`·ε₀.
    pub amplitude_fraction: f64,
    /// ν may move within ±`frequency_fraction`·ν₀.
    pub frequency_fraction: f64,
}

impl Default for RefineBounds {
    fn default() -> Self {
        Self {
            amplitude_fraction: 0.3,
            frequency_fraction: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub schedule: TransferSchedule,
    pub initial_objective: f64,
    pub final_objective: f64,
    pub trace: Vec<TracePoint>,
    pub evaluations: usize,
    pub hit_iteration_cap: bool,
}

/// Maximizes `objective` (typically a simulated transfer fidelity) over all
/// ε_j and ν_j of `schedule`, phases and duration held fixed.
///
/// The returned schedule never scores below the starting one. Candidates
/// for which the coupling map fails score −∞.
pub fn refine_schedule<F>(
    chain: &ChainConfig,
    schedule: &TransferSchedule,
    mut objective: F,
    bounds: &RefineBounds,
    options: &NelderMeadOptions,
) -> Result<Refinement>
where
    F: FnMut(&TransferSchedule) -> f64,
{
    schedule.validate_against(chain)?;
    for (name, v) in [
        ("amplitude_fraction", bounds.amplitude_fraction),
        ("frequency_fraction", bounds.frequency_fraction),
    ] {
        if !(v.is_finite() && (0.0..1.0).contains(&v)) {
            return Err(Error::validation(format!("refine.{name}"), "must lie in [0, 1)"));
        }
    }

    let start: Vec<f64> = schedule
        .modulations
        .iter()
        .map(|m| m.amplitude)
        .chain(schedule.modulations.iter().map(|m| m.frequency))
        .collect();
    let k = schedule.modulations.len();
    let limits: Vec<(f64, f64)> = start
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let frac = if i < k {
                bounds.amplitude_fraction
            } else {
                bounds.frequency_fraction
            };
            (v * (1.0 - frac), v * (1.0 + frac))
        })
        .collect();

    let build = |x: &[f64]| -> Result<TransferSchedule> {
        let mods = schedule
            .modulations
            .iter()
            .enumerate()
            .map(|(j, m)| ModulationSpec::new(x[j], x[k + j], m.phase))
            .collect();
        TransferSchedule::new(chain, mods, schedule.duration)
    };

    let initial_objective = objective(schedule);
    let result = nelder_mead(
        |x| match build(x) {
            Ok(s) => -objective(&s),
            Err(_) => f64::INFINITY,
        },
        &start,
        &limits,
        options,
    );

    let trace = result
        .history
        .iter()
        .enumerate()
        .map(|(i, v)| TracePoint {
            iteration: i + 1,
            objective: -v,
        })
        .collect();
    let (schedule, final_objective) = if -result.value >= initial_objective {
        (build(&result.best)?, -result.value)
    } else {
        (schedule.clone(), initial_objective)
    };
    Ok(Refinement {
        schedule,
        initial_objective,
        final_objective,
        trace,
        evaluations: result.evaluations + 1,
        hit_iteration_cap: result.hit_iteration_cap,
    })
}
