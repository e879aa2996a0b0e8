use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bessel::{bessel_j0, bessel_j1, J1_ARGMAX, J1_MAX};
use crate::model::{ChainConfig, ModulationSpec, TransferSchedule};
use crate::{Error, Result};

/// Effective exchange g′_j for link `j` (joining qubits j−1 and j).
///
/// `static_coupling` and the result are in the same frequency unit.
/// `upstream_index` is α_{j−1} and must be present for j > 1.
pub fn effective_coupling(
    link: usize,
    static_coupling: f64,
    upstream_index: Option<f64>,
    index: f64,
    phase: f64,
) -> Result<Complex64> {
    if link == 0 {
        return Err(Error::validation("link", "link indices start at 1"));
    }
    if !(index >= 0.0) {
        return Err(Error::validation("alpha", format!("modulation index must be non-negative, got {index}")));
    }
    let magnitude = static_coupling * bessel_j1(index)?;
    if link == 1 {
        return Ok(Complex64::from_polar(magnitude, phase + FRAC_PI_2));
    }
    let upstream = upstream_index
        .ok_or_else(|| Error::validation("alpha_prev", format!("link {link} needs the upstream index")))?;
    if !(upstream >= 0.0) {
        return Err(Error::validation("alpha_prev", "modulation index must be non-negative"));
    }
    let magnitude = magnitude * bessel_j0(upstream)?;
    let arg = if link.is_multiple_of(2) {
        -(phase - FRAC_PI_2)
    } else {
        phase + FRAC_PI_2
    };
    Ok(Complex64::from_polar(magnitude, arg))
}

/// Solves g·J_1(α)·attenuation = target for α on the first monotone branch
/// [0, J1_ARGMAX].
///
/// An infeasible target is reported with `link = 0`; callers that know the
/// link index substitute it.
pub fn invert_link(target: f64, static_coupling: f64, attenuation: f64) -> Result<f64> {
    if !(target >= 0.0) {
        return Err(Error::validation("target", "target magnitude must be non-negative"));
    }
    if !(attenuation > 0.0 && attenuation <= 1.0) {
        return Err(Error::validation("attenuation", format!("must lie in (0, 1], got {attenuation}")));
    }
    if !(static_coupling > 0.0) {
        return Err(Error::validation("static_coupling", "must be positive"));
    }
    let maximum = static_coupling * J1_MAX * attenuation;
    if target > maximum {
        return Err(Error::Infeasible {
            link: 0,
            target_mhz: target,
            maximum_mhz: maximum,
        });
    }
    if target == 0.0 {
        return Ok(0.0);
    }
    let f = |a: f64| static_coupling * attenuation * bessel_j1(a).expect("branch is inside the range guard") - target;
    let (mut lo, mut hi) = (0.0_f64, J1_ARGMAX);
    // f(lo) < 0 <= f(hi); bisection down to float resolution.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if f(lo).abs() < f(hi).abs() { lo } else { hi })
}

/// Target coupling profile g′_j = g′ √(j(N−j)) with τ = π/(2g′).
///
/// `base_coupling` is g′/2π in MHz and `duration` is τ in ns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingTarget {
    pub chain_length: usize,
    pub base_coupling: f64,
    pub duration: f64,
}

impl CouplingTarget {
    /// τ = π/(2g′) with g′ = 2π·f: τ[ns] = 250 / f[MHz].
    const TAU_TIMES_F: f64 = 250.0;

    pub fn from_duration(chain_length: usize, duration: f64) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::validation("transfer.duration", "must be positive"));
        }
        Self::checked(chain_length, Self::TAU_TIMES_F / duration, duration)
    }

    pub fn from_base_coupling(chain_length: usize, base_coupling: f64) -> Result<Self> {
        if !(base_coupling.is_finite() && base_coupling > 0.0) {
            return Err(Error::validation("transfer.base_coupling", "must be positive"));
        }
        Self::checked(chain_length, base_coupling, Self::TAU_TIMES_F / base_coupling)
    }

    fn checked(chain_length: usize, base_coupling: f64, duration: f64) -> Result<Self> {
        if chain_length < 2 {
            return Err(Error::validation("transfer.chain_length", "need at least two qubits"));
        }
        Ok(Self {
            chain_length,
            base_coupling,
            duration,
        })
    }

    /// g′ in rad/ns.
    pub fn base_coupling_rad_ns(&self) -> f64 {
        PI / (2.0 * self.duration)
    }

    /// |g′_j|/2π in MHz for j = 1..N−1.
    pub fn link_magnitudes(&self) -> Vec<f64> {
        let n = self.chain_length;
        (1..n).map(|j| self.base_coupling * ((j * (n - j)) as f64).sqrt()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkFeasibility {
    pub link: usize,
    pub target: f64,
    pub maximum: f64,
    /// target / maximum; feasible when <= 1.
    pub headroom: f64,
}

/// Per-link headroom of a target, propagating the upstream J_0 attenuation of
/// the sequential solution (saturated at the branch maximum when a link is
/// infeasible).
pub fn feasibility_report(chain: &ChainConfig, target: &CouplingTarget) -> Result<Vec<LinkFeasibility>> {
    chain.validate()?;
    check_target(chain, target)?;
    let mut attenuation = 1.0;
    let mut out = Vec::new();
    for (i, (&want, &g)) in target.link_magnitudes().iter().zip(&chain.static_couplings).enumerate() {
        let maximum = g * J1_MAX * attenuation;
        out.push(LinkFeasibility {
            link: i + 1,
            target: want,
            maximum,
            headroom: want / maximum,
        });
        let alpha = invert_link(want.min(maximum), g, attenuation)?;
        attenuation = bessel_j0(alpha)?;
    }
    Ok(out)
}

fn check_target(chain: &ChainConfig, target: &CouplingTarget) -> Result<()> {
    if target.chain_length != chain.len() {
        return Err(Error::DimensionMismatch {
            expected: chain.len(),
            actual: target.chain_length,
        });
    }
    Ok(())
}

/// Perfect-transfer schedule: ν_j = |Δ_j| exactly, α_j solved left to right
/// using the upstream J_0(α_{j−1}), ε_j = α_j ν_j.
pub fn synthesize_schedule(chain: &ChainConfig, target: &CouplingTarget, phases: &[f64]) -> Result<TransferSchedule> {
    chain.validate()?;
    check_target(chain, target)?;
    if phases.len() + 1 != chain.len() {
        return Err(Error::DimensionMismatch {
            expected: chain.len() - 1,
            actual: phases.len(),
        });
    }
    chain.check_alternating_detunings()?;

    let detunings = chain.detunings_mhz();
    let mut attenuation = 1.0;
    let mut modulations = Vec::with_capacity(phases.len());
    for (i, &want) in target.link_magnitudes().iter().enumerate() {
        let link = i + 1;
        let alpha = invert_link(want, chain.static_couplings[i], attenuation).map_err(|e| match e {
            Error::Infeasible {
                target_mhz,
                maximum_mhz,
                ..
            } => Error::Infeasible {
                link,
                target_mhz,
                maximum_mhz,
            },
            other => other,
        })?;
        let nu = detunings[i].abs();
        modulations.push(ModulationSpec::new(alpha * nu, nu, phases[i]));
        attenuation = bessel_j0(alpha)?;
    }
    TransferSchedule::new(chain, modulations, target.duration)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::reference_chain;

    #[test]
    fn zero_index_gives_zero_coupling() {
        assert_eq!(effective_coupling(1, 16.68, None, 0.0, 0.3).unwrap().norm(), 0.0);
    }

    #[test]
    fn upstream_index_required_beyond_first_link() {
        assert!(effective_coupling(2, 17.5, None, 1.0, 0.0).is_err());
        assert!(effective_coupling(0, 17.5, None, 1.0, 0.0).is_err());
    }

    #[test]
    fn invert_zero_target() {
        assert_eq!(invert_link(0.0, 16.68, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn infeasible_reports_maximum() {
        let g = 16.68;
        match invert_link(1.01 * g * 0.5819, g, 1.0) {
            Err(Error::Infeasible { maximum_mhz, .. }) => assert!((maximum_mhz - g * J1_MAX).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invert_rejects_bad_attenuation() {
        assert!(invert_link(1.0, 16.68, 0.0).is_err());
        assert!(invert_link(1.0, 16.68, 1.5).is_err());
        assert!(invert_link(-1.0, 16.68, 1.0).is_err());
    }

    #[test]
    fn target_duration_relation() {
        let t = CouplingTarget::from_duration(2, 84.0).unwrap();
        assert!((t.base_coupling - 2.976_190_476_190_476).abs() < 1e-12);
        assert!((t.base_coupling_rad_ns() * t.duration - FRAC_PI_2).abs() < 1e-15);
        let u = CouplingTarget::from_base_coupling(2, 2.976_190_476_190_476).unwrap();
        assert!((u.duration - 84.0).abs() < 1e-9);
        assert_eq!(t.link_magnitudes().len(), 1);
    }

    #[test]
    fn targets_are_palindromic() {
        for n in 2..12 {
            let m = CouplingTarget::from_duration(n, 84.0).unwrap().link_magnitudes();
            for j in 0..m.len() {
                assert_eq!(m[j], m[m.len() - 1 - j]);
            }
        }
    }

    #[test]
    fn weak_middle_link_is_infeasible_at_link_two() {
        let mut chain = reference_chain();
        chain.static_couplings[1] = 10.0;
        let target = CouplingTarget::from_duration(4, 84.0).unwrap();
        match synthesize_schedule(&chain, &target, &[0.0; 3]) {
            Err(Error::Infeasible { link, .. }) => assert_eq!(link, 2),
            other => panic!("unexpected {other:?}"),
        }
        let report = feasibility_report(&chain, &target).unwrap();
        assert!(report[0].headroom < 1.0);
        assert!(report[1].headroom > 1.0);
    }

    #[test]
    fn synthesis_requires_alternating_ladder() {
        let mut chain = reference_chain();
        chain.qubits[2].operating_freq = 5.3;
        let target = CouplingTarget::from_duration(4, 84.0).unwrap();
        assert!(matches!(
            synthesize_schedule(&chain, &target, &[0.0; 3]),
            Err(Error::NonAlternatingDetuning { link: 2, .. })
        ));
    }

    #[test]
    fn synthesized_schedule_is_resonant_and_mirror_symmetric() {
        let chain = reference_chain();
        let target = CouplingTarget::from_duration(4, 84.0).unwrap();
        let s = synthesize_schedule(&chain, &target, &[0.0; 3]).unwrap();
        for (m, d) in s.modulations.iter().zip(chain.detunings_mhz()) {
            assert_eq!(m.frequency, d.abs());
        }
        assert!(s.is_mirror_symmetric(1e-10));
        s.validate_against(&chain).unwrap();
    }
}
