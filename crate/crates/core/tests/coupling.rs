mod common;

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use common::*;
use proptest::prelude::*;
use qst_core::config::reference_chain;
use qst_core::coupling::*;
use qst_core::dynamics::IntegratorOptions;
use qst_core::experiments::lab_transfer_scores;
use qst_core::model::{
    build_effective_hamiltonian, EffectiveOptions, Frame, LabOptions, ModulationSpec, TransferSchedule,
};
use qst_core::Error;

/// Power-series J_n.
fn series(order: i32, x: f64) -> f64 {
    let mut term = (0.5 * x).powi(order) / (1..=order).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..80 {
        term *= -(0.25 * x * x) / (k as f64 * (k + order) as f64);
        sum += term;
    }
    sum
}

/// Bessel's integral J_n(x) = (1/π)∫₀^π cos(nθ − x sin θ) dθ by composite Simpson.
fn quadrature(order: i32, x: f64) -> f64 {
    let m = 2000;
    let h = PI / m as f64;
    let f = |t: f64| (order as f64 * t - x * t.sin()).cos();
    let mut s = f(0.0) + f(PI);
    for k in 1..m {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * h);
    }
    s * h / 3.0 / PI
}

#[test]
fn bessel_agrees_with_both_oracles() {
    for k in 0..=100 {
        let x = 0.1 * k as f64;
        for (order, lib) in [(0, bessel_j0(x).unwrap()), (1, bessel_j1(x).unwrap())] {
            assert!((lib - series(order, x)).abs() < 1e-10, "J{order}({x}) series");
            assert!((lib - quadrature(order, x)).abs() < 1e-10, "J{order}({x}) quadrature");
        }
    }
    assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
    assert_eq!(bessel_j1(0.0).unwrap(), 0.0);
    assert!((bessel_j1(1.8412).unwrap() - 0.5819).abs() < 1e-4);
    assert!((series(1, J1_ARGMAX) - J1_MAX).abs() < 1e-12);
}

#[test]
fn j0_derivative_is_minus_j1() {
    let h = 1e-5;
    for k in 0..=50 {
        let x = 0.1 * k as f64 + h;
        let d = (bessel_j0(x + h).unwrap() - bessel_j0(x - h).unwrap()) / (2.0 * h);
        assert!((d + bessel_j1(x).unwrap()).abs() < 1e-6);
    }
}

#[test]
fn coupling_map_examples() {
    assert_eq!(effective_coupling(1, 16.68, None, 0.0, 0.0).unwrap().norm(), 0.0);
    let g1 = effective_coupling(1, 16.68, None, 1.0, 0.0).unwrap();
    assert!((g1.norm() - 16.68 * series(1, 1.0)).abs() < 1e-10);
    assert!((g1.norm() - 7.34).abs() < 0.01);
    assert!((g1.arg() - FRAC_PI_2).abs() < 1e-12);

    let g2 = effective_coupling(2, 17.50, Some(1.0), 1.0, 0.0).unwrap();
    assert!((g2.norm() - 17.50 * series(1, 1.0) * series(0, 1.0)).abs() < 1e-10);
    assert!((g2.norm() - 5.89).abs() < 0.01);
    assert!((g2.arg() - FRAC_PI_2).abs() < 1e-12);
    assert!(effective_coupling(2, 17.5, None, 1.0, 0.0).unwrap_err().is_validation());
}

#[test]
fn link_inversion_examples() {
    let g = 17.5;
    assert_eq!(invert_link(0.0, g, 1.0).unwrap(), 0.0);
    let alpha = invert_link(g * series(1, 1.0), g, 1.0).unwrap();
    assert!((alpha - 1.0).abs() < 1e-10);
    assert!(matches!(invert_link(1.01 * g * 0.5819, g, 1.0), Err(Error::Infeasible { .. })));
}

#[test]
fn two_qubit_target_from_84_ns() {
    let target = CouplingTarget::from_base_coupling(2, 2.976).unwrap();
    assert!((target.duration - 84.0).abs() < 0.01);
    assert_eq!(target.link_magnitudes().len(), 1);
    // τ·g′ = π/2 with g′ in rad/ns.
    let t = CouplingTarget::from_duration(2, 84.0).unwrap();
    assert!((t.duration * t.base_coupling_rad_ns() - FRAC_PI_2).abs() < 1e-15);
}

#[test]
fn four_qubit_schedule_from_reference_chain() {
    let chain = reference_chain();
    let s = synthesize(&chain, 84.0, &[0.0; 3]);
    let mags: Vec<f64> = s.effective_couplings.iter().map(|c| c.norm()).collect();
    for (m, want) in mags.iter().zip([5.154, 5.952, 5.154]) {
        assert!((m - want).abs() < 2e-3, "{mags:?}");
    }
    let alphas = s.indices();
    for (a, want) in alphas.iter().zip([0.65, 0.82, 0.75]) {
        assert!((a - want).abs() < 0.01, "{alphas:?}");
    }
    // Recompute the map with the series oracle, left to right.
    let mut upstream = 1.0;
    let target = CouplingTarget::from_duration(4, 84.0).unwrap().link_magnitudes();
    for j in 0..3 {
        let got = chain.static_couplings[j] * series(1, alphas[j]) * upstream;
        assert!((got / target[j] - 1.0).abs() < 1e-10);
        upstream = series(0, alphas[j]);
    }
    assert!(s.is_mirror_symmetric(1e-10));
    for (m, d) in s.modulations.iter().zip(chain.detunings_mhz()) {
        assert_eq!(m.frequency, d.abs());
    }

    // Effective sector operator: off-diagonals in ratio √3 : 2 : √3.
    let h = build_effective_hamiltonian(&chain, &s, EffectiveOptions::default()).unwrap();
    let off: Vec<f64> = (1..4).map(|i| h[(i, i + 1)].norm()).collect();
    assert!((off[0] / off[1] - 3f64.sqrt() / 2.0).abs() < 1e-10);
    assert!((off[2] / off[1] - 3f64.sqrt() / 2.0).abs() < 1e-10);
}

#[test]
fn weak_middle_coupling_is_infeasible_at_link_two() {
    let mut chain = reference_chain();
    chain.static_couplings[1] = 10.0;
    let target = CouplingTarget::from_duration(4, 84.0).unwrap();
    match synthesize_schedule(&chain, &target, &[0.0; 3]) {
        Err(Error::Infeasible { link, maximum_mhz, .. }) => {
            assert_eq!(link, 2);
            let a1 = invert_link(target.link_magnitudes()[0], chain.static_couplings[0], 1.0).unwrap();
            assert!((maximum_mhz - 10.0 * J1_MAX * series(0, a1)).abs() < 1e-9);
        }
        other => panic!("expected infeasible link 2, got {other:?}"),
    }
    let report = feasibility_report(&chain, &target).unwrap();
    assert!(report[0].headroom <= 1.0 && report[1].headroom > 1.0);
}

proptest! {
    #[test]
    fn synthesis_round_trips(tau in 70.0f64..400.0, phases in prop::array::uniform3(0.0f64..TAU)) {
        let chain = reference_chain();
        let target = CouplingTarget::from_duration(4, tau).unwrap();
        let s = synthesize_schedule(&chain, &target, &phases).unwrap();
        let fresh = s.compute_couplings(&chain).unwrap();
        for (g, want) in fresh.iter().zip(target.link_magnitudes()) {
            prop_assert!((g.norm() / want - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn phase_map_follows_link_parity(phi in 0.0f64..TAU, alpha in 0.05f64..1.8, up in 0.0f64..1.8) {
        let wrap = |x: f64| (x + PI).rem_euclid(TAU) - PI;
        let g1 = effective_coupling(1, 16.68, None, alpha, phi).unwrap();
        prop_assert!(wrap(g1.arg() - phi - FRAC_PI_2).abs() < 1e-9);
        let g2 = effective_coupling(2, 17.5, Some(up), alpha, phi).unwrap();
        prop_assert!(wrap(g2.arg() + phi - FRAC_PI_2).abs() < 1e-9);
        let g3 = effective_coupling(3, 16.5, Some(up), alpha, phi).unwrap();
        prop_assert!(wrap(g3.arg() - phi - FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn inversion_is_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let g = 17.5;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let max = g * J1_MAX;
        let x = invert_link(lo * max, g, 1.0).unwrap();
        let y = invert_link(hi * max, g, 1.0).unwrap();
        prop_assert!(x <= y);
        prop_assert!(y <= J1_ARGMAX);
    }
}

#[test]
fn exact_schedule_is_a_fixed_point_of_refinement() {
    let chain = reference_chain();
    let s = synthesize(&chain, 84.0, &[0.0; 3]);
    let objective = |c: &TransferSchedule| {
        let want = CouplingTarget::from_duration(4, 84.0).unwrap().link_magnitudes();
        match c.compute_couplings(&chain) {
            Ok(g) => -g.iter().zip(&want).map(|(a, b)| (a.norm() - b).powi(2)).sum::<f64>(),
            Err(_) => f64::NEG_INFINITY,
        }
    };
    let r = refine_schedule(&chain, &s, objective, &RefineBounds::default(), &NelderMeadOptions::default()).unwrap();
    for (a, b) in r.schedule.modulations.iter().zip(&s.modulations) {
        assert!((a.amplitude / b.amplitude - 1.0).abs() < 1e-3);
    }
    assert!(r.final_objective >= r.initial_objective);
}

#[test]
fn nelder_mead_finds_quadratic_maximum() {
    let r = nelder_mead(
        |x| (x[0] - 0.3).powi(2) + 2.0 * (x[1] + 1.2).powi(2),
        &[1.0, 1.0],
        &[(-5.0, 5.0), (-5.0, 5.0)],
        &NelderMeadOptions {
            tolerance: 1e-9,
            ..NelderMeadOptions::default()
        },
    );
    assert!((r.best[0] - 0.3).abs() < 1e-6 && (r.best[1] + 1.2).abs() < 1e-6);
}

#[test]
fn refinement_recovers_from_perturbed_amplitude() {
    let chain = reference_chain();
    let mut s = synthesize(&chain, 84.0, &[0.0; 3]);
    s.modulations[1] = ModulationSpec::new(1.05 * s.modulations[1].amplitude, s.modulations[1].frequency, 0.0);
    s.refresh(&chain).unwrap();
    let lab = LabOptions {
        frame: Frame::Operating,
        counter_rotating: false,
    };
    let objective = |c: &TransferSchedule| {
        lab_transfer_scores(&chain, c, lab, IntegratorOptions::default()).map_or(f64::NEG_INFINITY, |p| p.0)
    };
    let options = NelderMeadOptions {
        max_iterations: 40,
        ..NelderMeadOptions::default()
    };
    let r = refine_schedule(&chain, &s, objective, &RefineBounds::default(), &options).unwrap();
    assert!(r.final_objective >= r.initial_objective);
    assert!(r.trace.windows(2).all(|w| w[1].objective >= w[0].objective));
}
