use std::f64::consts::TAU;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use qst_core::calibration::{deconvolve, simulate_step_response};
use qst_core::config::{default_document, ConfigDocument};
use qst_core::coupling::{
    feasibility_report, refine_schedule, synthesize_schedule, CouplingTarget, NelderMeadOptions, RefineBounds,
};
use qst_core::dynamics::{evolve, EvolutionRequest, HamiltonianSource, IntegratorOptions, NoiseModel};
use qst_core::experiments::{
    chevron_scan, lab_transfer_scores, phase_scan, predicted_phase, qst_population_trace, repeated_transfer,
    standard_counts, ChevronMode, ChevronRequest, TraceModel,
};
use qst_core::model::{ChainConfig, Frame, LabOptions, QuantumState, Representation, TransferSchedule};
use qst_core::tomography::{
    process_fidelity, process_tomography, simulate_state_tomography, standard_inputs, ChiMatrix, ConfusionMatrix,
    Qubit2,
};
use qst_core::Complex64;

use crate::output::Artifacts;
use crate::{Cli, Command, ModelChoice};

/// A self-check found a problem.
#[derive(Debug)]
pub struct CheckFailed(pub Vec<String>);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "self-check failed: {}", self.0.join("; "))
    }
}

impl std::error::Error for CheckFailed {}

pub fn run(cli: &Cli) -> Result<()> {
    let doc = match &cli.config {
        Some(path) => ConfigDocument::load(path).with_context(|| format!("loading {}", path.display()))?,
        None => default_document(),
    };
    let workers = cli.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(qst_core::Error::validation("--workers", "must be at least 1").into());
    }
    // Ignore the error when a pool already exists (repeated calls in tests).
    let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();

    let mut out = Artifacts::create(&cli.out)?;
    match &cli.command {
        Command::Synthesize { tau_ns } => synthesize(&doc, *tau_ns, &mut out)?,
        Command::Evolve {
            model,
            t_max_ns,
            step_ns,
            noise,
        } => evolve_cmd(&doc, *model, *t_max_ns, *step_ns, *noise, &mut out)?,
        Command::Chevron {
            link,
            alpha,
            nu_span_mhz,
            t_max_ns,
            points,
            samples,
            dual,
        } => chevron(&doc, *link, *alpha, *nu_span_mhz, *t_max_ns, *points, *samples, *dual, &mut out)?,
        Command::PhaseScan { link, points } => phase(&doc, *link, *points, &mut out)?,
        Command::FidelityDecay { max_transfers, thermal } => fidelity_decay(&doc, *max_transfers, *thermal, &mut out)?,
        Command::Tomography { shots, noise } => tomography(&doc, shots.unwrap_or(doc.readout.shots), *noise, cli.seed, &mut out)?,
        Command::Calibrate { samples } => calibrate(&doc, *samples, &mut out)?,
        Command::Optimize { max_iterations } => optimize(&doc, *max_iterations, &mut out)?,
        Command::SelfCheck => self_check(&doc, &mut out)?,
    }
    let manifest = out.finish(cli.command.name(), cli.seed, workers, doc.to_toml()?)?;
    println!("{}: wrote {} artifacts to {}", manifest.subcommand, manifest.artifacts.len() + 1, manifest.output_dir);
    Ok(())
}

/// The configured schedule, or one synthesized from the transfer settings.
fn resolve_schedule(doc: &ConfigDocument, chain: &ChainConfig) -> Result<TransferSchedule> {
    match &doc.schedule {
        Some(s) => Ok(s.clone()),
        None => synthesize_for(chain, doc.transfer.duration, &doc.transfer.phases_for(chain.len())),
    }
}

fn synthesize_for(chain: &ChainConfig, tau: f64, phases: &[f64]) -> Result<TransferSchedule> {
    let target = CouplingTarget::from_duration(chain.len(), tau)?;
    match synthesize_schedule(chain, &target, phases) {
        Ok(s) => Ok(s),
        Err(e @ qst_core::Error::Infeasible { .. }) => {
            for l in feasibility_report(chain, &target)? {
                eprintln!(
                    "link {}: target {:.4} MHz, maximum {:.4} MHz, headroom {:.3}",
                    l.link, l.target, l.maximum, l.headroom
                );
            }
            Err(e.into())
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct LinkRow {
    link: usize,
    epsilon_mhz: f64,
    nu_mhz: f64,
    phase_rad: f64,
    alpha: f64,
    coupling_mhz: f64,
    coupling_arg_rad: f64,
    headroom: f64,
}

#[derive(Serialize)]
struct SynthesisSummary {
    duration_ns: f64,
    base_coupling_mhz: f64,
    /// |g′_j| / |g′_1|
    coupling_ratios: Vec<f64>,
    columns: String,
    links: Vec<LinkRow>,
}

fn synthesize(doc: &ConfigDocument, tau: Option<f64>, out: &mut Artifacts) -> Result<()> {
    let chain = &doc.chain;
    let tau = tau.unwrap_or(doc.transfer.duration);
    let schedule = synthesize_for(chain, tau, &doc.transfer.phases_for(chain.len()))?;
    let target = CouplingTarget::from_duration(chain.len(), tau)?;
    let report = feasibility_report(chain, &target)?;
    let links: Vec<LinkRow> = schedule
        .modulations
        .iter()
        .zip(&schedule.effective_couplings)
        .zip(&report)
        .enumerate()
        .map(|(i, ((m, g), f))| LinkRow {
            link: i + 1,
            epsilon_mhz: m.amplitude,
            nu_mhz: m.frequency,
            phase_rad: m.phase,
            alpha: m.index(),
            coupling_mhz: g.norm(),
            coupling_arg_rad: g.arg(),
            headroom: f.headroom,
        })
        .collect();
    let mut csv = String::from("link,epsilon_mhz,nu_mhz,phase_rad,alpha,coupling_mhz,coupling_arg_rad,headroom\n");
    for l in &links {
        csv.push_str(&format!(
            "{},{},{},{},{:.12},{:.12},{:.12},{:.6}\n",
            l.link, l.epsilon_mhz, l.nu_mhz, l.phase_rad, l.alpha, l.coupling_mhz, l.coupling_arg_rad, l.headroom
        ));
    }
    out.write("schedule.csv", csv.into_bytes())?;

    let first = links[0].coupling_mhz;
    out.toml(
        "summary.toml",
        &SynthesisSummary {
            duration_ns: tau,
            base_coupling_mhz: target.base_coupling,
            coupling_ratios: links.iter().map(|l| l.coupling_mhz / first).collect(),
            columns: "schedule.csv: link, ε/2π (MHz), ν/2π (MHz), φ (rad), α, |g′|/2π (MHz), arg g′ (rad), target/maximum".into(),
            links,
        },
    )?;
    let mut resolved = doc.clone();
    resolved.transfer.duration = tau;
    resolved.schedule = Some(schedule);
    out.write("schedule.toml", resolved.to_toml()?.into_bytes())?;
    Ok(())
}

#[derive(Serialize)]
struct EvolveSummary {
    model: String,
    noise: bool,
    transfer_time_ns: f64,
    transfer_population: f64,
    max_norm_drift: f64,
    columns: String,
}

fn evolve_cmd(
    doc: &ConfigDocument,
    model: ModelChoice,
    t_max: Option<f64>,
    step: f64,
    noisy: bool,
    out: &mut Artifacts,
) -> Result<()> {
    let chain = doc.noisy_chain();
    let schedule = resolve_schedule(doc, &chain)?;
    let t_max = t_max.unwrap_or(2.0 * schedule.duration);
    if !(step > 0.0 && t_max > 0.0) {
        return Err(qst_core::Error::validation("--step-ns", "step and window must be positive").into());
    }
    let n = (t_max / step).round() as usize;
    let times: Vec<f64> = (0..=n).map(|k| k as f64 * step).collect();
    let noise = noisy.then(|| NoiseModel::from_chain(&chain, doc.noise.thermal));
    let trace_model = match model {
        ModelChoice::Lab => TraceModel::Lab,
        ModelChoice::Effective => TraceModel::Effective,
    };
    let trace = qst_population_trace(
        &chain,
        &schedule,
        trace_model,
        (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
        times,
        noise,
        IntegratorOptions::default(),
    )?;
    out.csv("trajectory.csv", |w| trace.trajectory.write_csv(w))?;
    let s = trace.summary();
    out.toml(
        "summary.toml",
        &EvolveSummary {
            model: format!("{model:?}").to_lowercase(),
            noise: noisy,
            transfer_time_ns: s.transfer_time_ns,
            transfer_population: s.transfer_population,
            max_norm_drift: s.max_norm_drift,
            columns: "trajectory.csv: time (ns), P_e of each qubit, norm or trace".into(),
        },
    )
}

#[derive(Serialize)]
struct ChevronOut {
    link: usize,
    mode: String,
    amplitude_mhz: f64,
    resonance_mhz: f64,
    coupling_mhz: f64,
    analytic_coupling_mhz: f64,
    resonance_span: f64,
    columns: String,
}

#[allow(clippy::too_many_arguments)]
fn chevron(
    doc: &ConfigDocument,
    link: usize,
    alpha: f64,
    span: Option<f64>,
    t_max: Option<f64>,
    points: usize,
    samples: usize,
    dual: bool,
    out: &mut Artifacts,
) -> Result<()> {
    let chain = &doc.chain;
    if link == 0 || link >= chain.len() {
        return Err(qst_core::Error::validation("link", format!("link {link} outside the chain")).into());
    }
    let nu = chain.detunings_mhz()[link - 1].abs();
    let mut request = ChevronRequest::centered(chain, link, alpha * nu, 1.0, 3, 1.0, 8)?;
    if dual {
        if link < 2 {
            return Err(qst_core::Error::validation("link", "dual modulation needs an upstream modulated qubit (link ≥ 2)").into());
        }
        let schedule = resolve_schedule(doc, chain)?;
        request.mode = ChevronMode::Both {
            upstream: schedule.modulations[link - 2],
        };
    }
    let analytic = request.analytic_coupling(nu)?;
    let span = span.unwrap_or(3.0 * analytic.max(0.1));
    let t_max = t_max.unwrap_or(2.5 / (2.0 * analytic.max(0.1) * 1e-3));
    let mode = request.mode;
    let mut request = ChevronRequest::centered(chain, link, alpha * nu, span, points, t_max, samples)?;
    request.mode = mode;
    let map = chevron_scan(&request)?;
    out.csv("chevron.csv", |w| map.write_csv(w))?;
    let s = map.summary();
    out.toml(
        "summary.toml",
        &ChevronOut {
            link,
            mode: if dual { "both" } else { "single" }.into(),
            amplitude_mhz: alpha * nu,
            resonance_mhz: s.resonance_mhz,
            coupling_mhz: s.coupling_mhz,
            analytic_coupling_mhz: request.analytic_coupling(s.resonance_mhz)?,
            resonance_span: s.resonance_span,
            columns: "chevron.csv: ν/2π (MHz), time (ns), P_e of the upstream qubit".into(),
        },
    )
}

#[derive(Serialize)]
struct PhaseOut {
    link: usize,
    slope: f64,
    intercept_rad: f64,
    predicted_baseline_rad: f64,
    columns: String,
}

fn phase(doc: &ConfigDocument, link: usize, points: usize, out: &mut Artifacts) -> Result<()> {
    let chain = &doc.chain;
    let schedule = resolve_schedule(doc, chain)?;
    let grid: Vec<f64> = (0..points).map(|k| TAU * k as f64 / points.max(1) as f64).collect();
    let scan = phase_scan(chain, &schedule, link, &grid)?;
    out.csv("phase_scan.csv", |w| scan.write_csv(w))?;
    out.toml(
        "summary.toml",
        &PhaseOut {
            link,
            slope: scan.slope,
            intercept_rad: scan.intercept,
            predicted_baseline_rad: predicted_phase(chain, &schedule)?,
            columns: "phase_scan.csv: scanned φ (rad), unwrapped transferred phase φ_s (rad)".into(),
        },
    )
}

#[derive(Serialize)]
struct DecayOut {
    thermal: bool,
    amplitude: f64,
    amplitude_error: f64,
    per_transfer_fidelity: f64,
    per_transfer_fidelity_error: f64,
    residual_norm: f64,
    columns: String,
}

fn fidelity_decay(doc: &ConfigDocument, max: u32, thermal: bool, out: &mut Artifacts) -> Result<()> {
    let chain = doc.noisy_chain();
    let schedule = resolve_schedule(doc, &chain)?;
    let thermal = thermal || doc.noise.thermal;
    let noise = NoiseModel::from_chain(&chain, thermal);
    let fit = repeated_transfer(&chain, &schedule, &standard_counts(max), Some(&noise), IntegratorOptions::default())?;
    out.csv("fidelity_decay.csv", |w| fit.write_csv(w))?;
    out.toml(
        "summary.toml",
        &DecayOut {
            thermal,
            amplitude: fit.amplitude,
            amplitude_error: fit.amplitude_error,
            per_transfer_fidelity: fit.per_transfer,
            per_transfer_fidelity_error: fit.per_transfer_error,
            residual_norm: fit.residual_norm,
            columns: "fidelity_decay.csv: transfers m, process fidelity, fitted A·P^m + 0.25".into(),
        },
    )
}

#[derive(Serialize)]
struct TomographyOut {
    shots: u64,
    noise: bool,
    process_fidelity: f64,
    state_fidelities: Vec<f64>,
    columns: String,
}

fn tomography(doc: &ConfigDocument, shots: u64, noisy: bool, seed: u64, out: &mut Artifacts) -> Result<()> {
    let chain = doc.noisy_chain();
    let schedule = resolve_schedule(doc, &chain)?;
    let n = chain.len();
    let confusion = ConfusionMatrix::from_qubit(&chain.qubits[n - 1])?;
    let noise = noisy.then(|| NoiseModel::from_chain(&chain, doc.noise.thermal));
    let amplitude = qst_core::experiments::transfer_amplitude(&chain, &schedule)?;
    let correction = Complex64::from_polar(1.0, -amplitude.arg());
    let inputs = standard_inputs();

    let results: Vec<(Qubit2, qst_core::tomography::StateEstimate)> = inputs
        .par_iter()
        .enumerate()
        .map(|(i, input)| -> Result<_> {
            let factors: Vec<Qubit2> = std::iter::once(*input)
                .chain((1..n).map(|_| Qubit2::new(one(), zero(), zero(), zero())))
                .collect();
            let initial = QuantumState::new(
                n,
                Representation::Full,
                qst_core::model::StateData::Mixed(qst_core::linalg::product_density(&factors)),
            )?;
            let mut request = EvolutionRequest::new(
                HamiltonianSource::effective(&chain, &schedule),
                initial,
                vec![0.0, schedule.duration],
            );
            if let Some(noise) = &noise {
                request = request.with_noise(noise.clone());
            }
            let rho = evolve(&request)?.final_state().reduced_qubit(n - 1);
            let r = Qubit2::new(one(), zero(), zero(), correction);
            let rho = r * rho * r.adjoint();
            // Three bases per input, each with its own derived seed.
            let estimate = simulate_state_tomography(&rho, &confusion, shots, seed.wrapping_add(4 * i as u64))?;
            Ok((rho, estimate))
        })
        .collect::<Result<_>>()?;

    let pairs: Vec<(Qubit2, Qubit2)> = inputs.iter().zip(&results).map(|(i, (_, e))| (*i, e.density())).collect();
    let chi = process_tomography(&pairs)?;
    let fidelity = process_fidelity(&chi, &ChiMatrix::identity())?;

    let mut states = String::from("input,x_true,y_true,z_true,x_raw,y_raw,z_raw,x,y,z\n");
    let mut state_fidelities = Vec::new();
    for (i, (rho, est)) in results.iter().enumerate() {
        let truth = qst_core::tomography::BlochVector::from_density(rho);
        let (raw, phys) = (est.raw, est.physical);
        states.push_str(&format!(
            "{i},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
            truth.x, truth.y, truth.z, raw.x, raw.y, raw.z, phys.x, phys.y, phys.z
        ));
        state_fidelities.push((inputs[i] * est.density()).trace().re);
    }
    out.write("states.csv", states.into_bytes())?;
    let mut chi_csv = String::from("row,col,re,im\n");
    for (r, row) in chi.to_pairs().iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            chi_csv.push_str(&format!("{r},{c},{:.12e},{:.12e}\n", v[0], v[1]));
        }
    }
    out.write("chi.csv", chi_csv.into_bytes())?;
    out.toml(
        "summary.toml",
        &TomographyOut {
            shots,
            noise: noisy,
            process_fidelity: fidelity,
            state_fidelities,
            columns: "states.csv: input index, true/raw/physical Bloch vectors; chi.csv: χ entries over {I, X, Y, Z}".into(),
        },
    )
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

#[derive(Serialize)]
struct CalibrateOut {
    crosstalk_residual: Option<f64>,
    non_dominant_rows: Vec<usize>,
    regularization: f64,
    round_trip_error: f64,
    settling_window_ns: [f64; 2],
    raw_settling_deviation: f64,
    corrected_settling_deviation: f64,
    columns: String,
}

fn calibrate(doc: &ConfigDocument, samples: usize, out: &mut Artifacts) -> Result<()> {
    let crosstalk = doc.calibration.crosstalk()?;
    if let Some(c) = &crosstalk {
        let mut csv = String::from("matrix,row,col,value\n");
        for (name, m) in [("response", &c.response), ("correction", &c.correction)] {
            for r in 0..m.nrows() {
                for col in 0..m.ncols() {
                    csv.push_str(&format!("{name},{r},{col},{:.15e}\n", m[(r, col)]));
                }
            }
        }
        out.write("crosstalk.csv", csv.into_bytes())?;
    }

    let response = &doc.calibration.line_response;
    if samples < 40 {
        return Err(qst_core::Error::validation("samples", "need at least 40 samples").into());
    }
    let edge = 20;
    let target: Vec<f64> = (0..samples).map(|k| if k >= edge { 1.0 } else { 0.0 }).collect();
    let rate = response.sample_rate();
    let window = (edge as f64 / rate + 5.0, samples as f64 / rate);
    let raw = simulate_step_response(response, &target, &target, window, 1.0)?;
    let d = deconvolve(&target, response, doc.calibration.regularization)?;
    let fixed = simulate_step_response(response, &d.drive, &target, window, 1.0)?;
    let mut csv = String::from("time_ns,target,raw,drive,corrected\n");
    for (k, x) in target.iter().enumerate() {
        csv.push_str(&format!(
            "{},{},{:.12e},{:.12e},{:.12e}\n",
            k as f64 / rate,
            x,
            raw.trace[k],
            d.drive[k],
            fixed.trace[k]
        ));
    }
    out.write("step_response.csv", csv.into_bytes())?;
    out.toml(
        "summary.toml",
        &CalibrateOut {
            crosstalk_residual: crosstalk.as_ref().map(|c| c.residual),
            non_dominant_rows: crosstalk.as_ref().map(|c| c.non_dominant_rows()).unwrap_or_default(),
            regularization: d.regularization,
            round_trip_error: d.round_trip_error,
            settling_window_ns: [window.0, window.1],
            raw_settling_deviation: raw.settling_deviation,
            corrected_settling_deviation: fixed.settling_deviation,
            columns: "step_response.csv: time (ns), target, uncorrected response, predistorted drive, corrected response; crosstalk.csv: M_z and M̃_z entries".into(),
        },
    )
}

#[derive(Serialize)]
struct OptimizeOut {
    initial_objective: f64,
    final_objective: f64,
    evaluations: usize,
    hit_iteration_cap: bool,
    transfer_population: f64,
    return_population: f64,
    columns: String,
}

fn optimize(doc: &ConfigDocument, max_iterations: usize, out: &mut Artifacts) -> Result<()> {
    let chain = &doc.chain;
    let schedule = resolve_schedule(doc, chain)?;
    let fast = LabOptions {
        frame: Frame::Operating,
        counter_rotating: false,
    };
    let opts = IntegratorOptions::default();
    let objective = |s: &TransferSchedule| {
        lab_transfer_scores(chain, s, fast, opts).map_or(f64::NEG_INFINITY, |(a, b)| a + b)
    };
    let options = NelderMeadOptions {
        max_iterations,
        ..NelderMeadOptions::default()
    };
    let r = refine_schedule(chain, &schedule, objective, &RefineBounds::default(), &options)?;
    let (transfer, back) = lab_transfer_scores(chain, &r.schedule, LabOptions::default(), opts)?;

    let mut csv = String::from("iteration,objective\n");
    for p in &r.trace {
        csv.push_str(&format!("{},{:.12e}\n", p.iteration, p.objective));
    }
    out.write("refine_trace.csv", csv.into_bytes())?;
    let mut resolved = doc.clone();
    resolved.schedule = Some(r.schedule.clone());
    out.write("schedule.toml", resolved.to_toml()?.into_bytes())?;
    out.toml(
        "summary.toml",
        &OptimizeOut {
            initial_objective: r.initial_objective,
            final_objective: r.final_objective,
            evaluations: r.evaluations,
            hit_iteration_cap: r.hit_iteration_cap,
            transfer_population: transfer,
            return_population: back,
            columns: "refine_trace.csv: iteration, P_last(τ) + P_first(2τ) without counter-rotating terms".into(),
        },
    )
}

#[derive(Serialize)]
struct CheckOut {
    passed: bool,
    checks: Vec<String>,
}

fn self_check(doc: &ConfigDocument, out: &mut Artifacts) -> Result<()> {
    let mut checks = Vec::new();
    let mut failures = Vec::new();
    let mut record = |name: &str, result: std::result::Result<String, String>| match result {
        Ok(detail) => checks.push(format!("ok {name}: {detail}")),
        Err(detail) => {
            checks.push(format!("FAILED {name}: {detail}"));
            failures.push(format!("{name}: {detail}"));
        }
    };
    record("config", doc.validate().map(|_| "all fields valid".into()).map_err(|e| e.to_string()));
    record(
        "detuning ladder",
        doc.chain
            .check_alternating_detunings()
            .map(|_| format!("{:?} MHz", doc.chain.detunings_mhz()))
            .map_err(|e| e.to_string()),
    );
    match doc.calibration.crosstalk() {
        Ok(Some(c)) if c.residual < 1e-12 => record("crosstalk", Ok(format!("round-trip residual {:.2e}", c.residual))),
        Ok(Some(c)) => record("crosstalk", Err(format!("round-trip residual {:.2e}", c.residual))),
        Ok(None) => record("crosstalk", Ok("no correction matrix configured".into())),
        Err(e) => record("crosstalk", Err(e.to_string())),
    }
    record(
        "synthesis",
        resolve_schedule(doc, &doc.chain)
            .map(|s| format!("mirror symmetric: {}", s.is_mirror_symmetric(1e-10)))
            .map_err(|e| e.to_string()),
    );
    for (i, q) in doc.chain.qubits.iter().enumerate() {
        record(
            &format!("readout q{i}"),
            ConfusionMatrix::from_qubit(q).map(|c| format!("det {:.4}", c.determinant())).map_err(|e| e.to_string()),
        );
    }
    let passed = failures.is_empty();
    out.toml("summary.toml", &CheckOut { passed, checks })?;
    if !passed {
        bail!(CheckFailed(failures));
    }
    Ok(())
}
