mod common;

use std::f64::consts::FRAC_PI_2;

use common::{c, excited, linspace, reference_pair, scaled_chain, synthesize};
use proptest::prelude::*;
use qst_core::dynamics::{
    evolve_exact, evolve_lindblad, evolve_unitary, propagator, EvolutionRequest, HamiltonianSource,
    IntegratorOptions, NoiseModel, QubitNoise,
};
use qst_core::linalg::CMatrix;
use qst_core::model::{xy_full_matrix, xy_sector_matrix, Frame, LabOptions, QuantumState, Representation};
use qst_core::units::mhz_to_rad_ns;
use qst_core::{Complex64, Error};

fn mirror_couplings(n: usize, g: f64) -> Vec<Complex64> {
    (1..n).map(|j| c(g * ((j * (n - j)) as f64).sqrt(), 0.0)).collect()
}

fn no_drive_noise(t1: f64, t2_star: f64, thermal_pop: f64) -> NoiseModel {
    NoiseModel {
        qubits: vec![QubitNoise {
            t1,
            t2_star,
            thermal_pop,
        }],
    }
}

#[test]
fn zero_hamiltonian_is_stationary() {
    let psi = QuantumState::single_qubit(3, Representation::Full, 1, c(0.6, 0.0), c(0.0, 0.8)).unwrap();
    let req = EvolutionRequest::new(HamiltonianSource::Explicit(CMatrix::zeros(8, 8)), psi.clone(), linspace(0.0, 50.0, 6));
    let tr = evolve_unitary(&req).unwrap();
    for s in &tr.states {
        assert_eq!(s, &psi);
    }
}

#[test]
fn two_qubit_rabi_follows_cos_squared() {
    let g = mhz_to_rad_ns(2.976);
    let h = xy_sector_matrix(&[c(g, 0.0)]);
    let times = linspace(0.0, 150.0, 61);
    let tr = evolve_unitary(&EvolutionRequest::new(HamiltonianSource::Explicit(h), excited(2, Representation::Sector, 0), times.clone())).unwrap();
    for (t, p) in times.iter().zip(&tr.populations) {
        assert!((p[0] - (g * t).cos().powi(2)).abs() < 1e-9, "{t}: {} vs {}", p[0], (g * t).cos().powi(2));
        assert!((p[1] - (g * t).sin().powi(2)).abs() < 1e-9);
    }
    let swap = FRAC_PI_2 / g;
    let tr = evolve_unitary(&EvolutionRequest::new(
        HamiltonianSource::Explicit(xy_sector_matrix(&[c(g, 0.0)])),
        excited(2, Representation::Sector, 0),
        vec![0.0, swap],
    ))
    .unwrap();
    assert!(tr.populations[1][1] > 1.0 - 1e-9);
}

#[test]
fn synthesized_chain_transfers_and_returns() {
    let (chain, schedule) = reference_pair();
    let req = EvolutionRequest::new(
        HamiltonianSource::effective(&chain, &schedule),
        excited(4, Representation::Sector, 0),
        vec![0.0, 84.0, 168.0],
    );
    let tr = evolve_unitary(&req).unwrap();
    assert!(tr.populations[1][3] >= 1.0 - 1e-9, "{}", tr.populations[1][3]);
    assert!(tr.populations[2][0] >= 1.0 - 1e-9, "{}", tr.populations[2][0]);
    assert!(tr.max_norm_drift() < 1e-9);

    let h = qst_core::model::build_effective_hamiltonian(&chain, &schedule, Default::default()).unwrap();
    let exact = evolve_exact(&h, &excited(4, Representation::Sector, 0), 84.0).unwrap();
    let fid = exact.overlap(&tr.states[1]).unwrap();
    assert!((1.0 - fid).abs() < 1e-8);
}

#[test]
fn halving_the_step_is_converged() {
    let (chain, schedule) = reference_pair();
    let run = |factor: f64| {
        let req = EvolutionRequest::new(
            HamiltonianSource::Lab {
                chain: chain.clone(),
                schedule: schedule.clone(),
                options: LabOptions {
                    counter_rotating: false,
                    ..Default::default()
                },
            },
            excited(4, Representation::Full, 0),
            vec![0.0, 84.0],
        )
        .with_options(IntegratorOptions { step_factor: factor });
        evolve_unitary(&req).unwrap().final_state().clone()
    };
    let a = run(0.01);
    let b = run(0.005);
    assert!((1.0 - a.overlap(&b).unwrap()).abs() < 1e-8);
}

#[test]
fn exact_propagator_identities() {
    let h = xy_sector_matrix(&mirror_couplings(4, 0.03));
    let u0 = propagator(&h, 0.0).unwrap();
    assert!(qst_core::linalg::max_abs(&(u0 - CMatrix::identity(5, 5))) < 1e-14);
    let mut bad = h.clone();
    bad[(1, 2)] += c(0.0, 0.1);
    assert!(matches!(propagator(&bad, 1.0), Err(Error::NonHermitian { .. })));
}

#[test]
fn perfect_mirror_chain_has_unit_amplitude() {
    for n in [2usize, 3, 4, 6, 8] {
        let g = 0.04;
        let h = xy_sector_matrix(&mirror_couplings(n, g));
        let psi = evolve_exact(&h, &excited(n, Representation::Sector, 0), FRAC_PI_2 / g).unwrap();
        let amp = psi.vector().unwrap()[n].norm();
        assert!((amp - 1.0).abs() < 1e-12, "n = {n}: {amp}");
    }
}

#[test]
fn rk4_agrees_with_exact_propagator() {
    let h = xy_sector_matrix(&mirror_couplings(6, 0.05));
    let init = QuantumState::single_qubit(6, Representation::Sector, 2, c(0.6, 0.0), c(0.0, 0.8)).unwrap();
    let t = 123.4;
    let rk = evolve_unitary(&EvolutionRequest::new(HamiltonianSource::Explicit(h.clone()), init.clone(), vec![0.0, t])).unwrap();
    let ex = evolve_exact(&h, &init, t).unwrap();
    assert!((1.0 - rk.final_state().overlap(&ex).unwrap()).abs() < 1e-8);
}

#[test]
fn amplitude_damping_is_exponential() {
    let t1 = 17.5;
    let init = excited(1, Representation::Full, 0);
    let times = linspace(0.0, 40_000.0, 9);
    let req = EvolutionRequest::new(HamiltonianSource::Explicit(CMatrix::zeros(2, 2)), init, times.clone())
        .with_noise(no_drive_noise(t1, 2.0 * t1, 0.0));
    let tr = evolve_lindblad(&req).unwrap();
    for (t, p) in times.iter().zip(&tr.populations) {
        assert!((p[0] - (-t / (t1 * 1e3)).exp()).abs() < 1e-9, "{t}: {}", p[0]);
    }
}

#[test]
fn coherence_decays_at_t2_star() {
    let (t1, t2) = (17.5, 6.1);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let init = QuantumState::single_qubit(1, Representation::Full, 0, c(h, 0.0), c(h, 0.0)).unwrap();
    let times = linspace(0.0, 20_000.0, 5);
    let req = EvolutionRequest::new(HamiltonianSource::Explicit(CMatrix::zeros(2, 2)), init, times.clone())
        .with_noise(no_drive_noise(t1, t2, 0.0));
    let tr = evolve_lindblad(&req).unwrap();
    for (t, s) in times.iter().zip(&tr.states) {
        let coh = s.reduced_qubit(0)[(0, 1)].norm();
        assert!((coh - 0.5 * (-t / (t2 * 1e3)).exp()).abs() < 1e-9);
    }
}

#[test]
fn thermal_channel_reaches_its_population() {
    let p = 0.02;
    let init = QuantumState::ground(1, Representation::Full);
    let req = EvolutionRequest::new(HamiltonianSource::Explicit(CMatrix::zeros(2, 2)), init, vec![0.0, 500_000.0])
        .with_noise(no_drive_noise(17.5, 6.1, p));
    let tr = evolve_lindblad(&req).unwrap();
    assert!((tr.populations[1][0] - p).abs() < 1e-9);
}

#[test]
fn unphysical_rates_rejected() {
    let req = EvolutionRequest::new(HamiltonianSource::Explicit(CMatrix::zeros(2, 2)), excited(1, Representation::Full, 0), vec![0.0, 1.0])
        .with_noise(no_drive_noise(1.0, 2.5, 0.0));
    assert!(matches!(evolve_lindblad(&req), Err(Error::UnphysicalRates { .. })));
}

#[test]
fn pathological_frequencies_underflow() {
    let mut h = CMatrix::zeros(2, 2);
    h[(0, 0)] = c(1e12, 0.0);
    let req = EvolutionRequest::new(HamiltonianSource::Explicit(h), excited(1, Representation::Full, 0), vec![0.0, 1e3]);
    assert!(matches!(evolve_unitary(&req), Err(Error::StepUnderflow { .. })));
}

#[test]
fn bad_time_grids_rejected() {
    let h = HamiltonianSource::Explicit(CMatrix::zeros(2, 2));
    for times in [vec![1.0, 2.0], vec![0.0, 2.0, 2.0], vec![]] {
        let req = EvolutionRequest::new(h.clone(), excited(1, Representation::Full, 0), times);
        assert!(evolve_unitary(&req).is_err());
    }
}

#[test]
fn effective_dynamics_never_leave_the_sector() {
    let (chain, schedule) = reference_pair();
    let req = EvolutionRequest::new(
        HamiltonianSource::effective(&chain, &schedule),
        excited(4, Representation::Full, 0),
        linspace(0.0, 168.0, 9),
    );
    let tr = evolve_unitary(&req).unwrap();
    for s in &tr.states {
        let v = s.vector().unwrap();
        for (i, z) in v.iter().enumerate() {
            if i.count_ones() > 1 || (i == 0) {
                assert_eq!(z.norm(), 0.0);
            }
        }
    }
}

#[test]
fn rotating_and_absolute_frames_agree() {
    let mut chain = scaled_chain(1.0);
    chain.qubits.truncate(2);
    chain.static_couplings.truncate(1);
    let schedule = synthesize(&chain, 84.0, &[0.3]);
    let run = |frame| {
        let req = EvolutionRequest::new(
            HamiltonianSource::Lab {
                chain: chain.clone(),
                schedule: schedule.clone(),
                options: LabOptions {
                    frame,
                    counter_rotating: true,
                },
            },
            excited(2, Representation::Full, 0),
            linspace(0.0, 20.0, 5),
        );
        evolve_unitary(&req).unwrap()
    };
    let a = run(Frame::Operating);
    let b = run(Frame::Lab);
    for (pa, pb) in a.populations.iter().zip(&b.populations) {
        for (x, y) in pa.iter().zip(pb) {
            assert!((x - y).abs() < 1e-8);
        }
    }
}

/// Q3 population gap at τ between the full modulated model and the
/// effective model, for a detuning ladder scaled by `scale`.
fn rwa_gap(scale: f64) -> f64 {
    let chain = scaled_chain(scale);
    let schedule = synthesize(&chain, 84.0, &[0.0; 3]);
    let times = vec![0.0, 84.0];
    let lab = evolve_unitary(&EvolutionRequest::new(
        HamiltonianSource::lab(&chain, &schedule),
        excited(4, Representation::Full, 0),
        times.clone(),
    ))
    .unwrap();
    let eff = evolve_unitary(&EvolutionRequest::new(
        HamiltonianSource::effective(&chain, &schedule),
        excited(4, Representation::Sector, 0),
        times,
    ))
    .unwrap();
    (lab.populations[1][3] - eff.populations[1][3]).abs()
}

#[test]
fn rwa_equivalence_at_large_detuning() {
    // The reference ladder (200–285 MHz) leaves a dispersive gap of about
    // 0.2; equivalence at 1e-2 needs the ladder scaled up eightfold.
    let coarse = rwa_gap(8.0);
    let fine = rwa_gap(16.0);
    assert!(coarse < 1e-2, "gap {coarse}");
    assert!(fine < coarse, "{fine} !< {coarse}");
    let reference = rwa_gap(1.0);
    assert!(reference > coarse);
}

fn hermitian(n: usize, entries: &[f64]) -> CMatrix {
    let mut h = CMatrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        h[(i, i)] = c(entries[k], 0.0);
        k += 1;
        for j in i + 1..n {
            h[(i, j)] = c(entries[k], entries[k + 1]);
            h[(j, i)] = h[(i, j)].conj();
            k += 2;
        }
    }
    h
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn unitary_runs_preserve_norm(entries in prop::collection::vec(-0.2f64..0.2, 16), t in 1.0f64..200.0) {
        let h = hermitian(4, &entries);
        let init = QuantumState::single_qubit(2, Representation::Full, 1, c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let tr = evolve_unitary(&EvolutionRequest::new(HamiltonianSource::Explicit(h), init, vec![0.0, t / 2.0, t])).unwrap();
        prop_assert!(tr.max_norm_drift() < 1e-9);
    }

    #[test]
    fn lindblad_runs_are_cptp(
        g in 0.005f64..0.05,
        t1 in 1.0f64..30.0,
        ratio in 0.05f64..2.0,
        thermal in 0.0f64..0.1,
    ) {
        let noise = NoiseModel { qubits: vec![QubitNoise { t1, t2_star: ratio * t1, thermal_pop: thermal }; 3] };
        let h = xy_full_matrix(&[c(g, 0.0), c(0.0, g)]);
        let init = QuantumState::single_qubit(3, Representation::Full, 0, c(0.8, 0.0), c(0.0, 0.6)).unwrap();
        let tr = evolve_lindblad(&EvolutionRequest::new(HamiltonianSource::Explicit(h), init, linspace(0.0, 3000.0, 4)).with_noise(noise)).unwrap();
        prop_assert!(tr.max_norm_drift() < 1e-8);
        for s in &tr.states {
            let min = s.density_matrix().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
            prop_assert!(min > -1e-8);
        }
    }
}
