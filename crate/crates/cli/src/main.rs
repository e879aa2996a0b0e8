//! `qstchain`: command-line front end for simulating state transfer on
//! parametrically modulated qubit chains.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qstchain", version, about = "Quantum state transfer on parametrically modulated qubit chains")]
struct Cli {
    /// Configuration document (TOML). The bundled device is used when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV data, summary and manifest.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for every random draw of the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for parameter sweeps (default: all processors).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelChoice {
    Lab,
    Effective,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize the perfect-transfer modulation schedule.
    Synthesize {
        /// Transfer time in ns (overrides the configuration).
        #[arg(long)]
        tau_ns: Option<f64>,
    },
    /// Population trace of every qubit after exciting qubit 0.
    Evolve {
        #[arg(long, value_enum, default_value = "effective")]
        model: ModelChoice,
        /// Trace length in ns (default 2τ).
        #[arg(long)]
        t_max_ns: Option<f64>,
        /// Sample spacing in ns.
        #[arg(long, default_value_t = 1.0)]
        step_ns: f64,
        /// Include relaxation and dephasing from the configuration.
        #[arg(long)]
        noise: bool,
    },
    /// Chevron scan of one link with the rest of the chain removed.
    Chevron {
        /// Link j couples qubits j−1 and j (1-based).
        #[arg(long, default_value_t = 1)]
        link: usize,
        /// Modulation index α = ε/ν of the scanned qubit.
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Half-width of the ν grid in MHz (default 3 |g′|).
        #[arg(long)]
        nu_span_mhz: Option<f64>,
        /// Time window in ns (default 2.5 oscillation periods).
        #[arg(long)]
        t_max_ns: Option<f64>,
        /// Number of ν grid points.
        #[arg(long, default_value_t = 9)]
        points: usize,
        /// Time samples per ν column.
        #[arg(long, default_value_t = 121)]
        samples: usize,
        /// Also drive the upstream qubit with its scheduled modulation.
        #[arg(long)]
        dual: bool,
    },
    /// Transferred-state phase versus one modulation phase.
    PhaseScan {
        /// Link whose modulation phase is scanned (1-based).
        #[arg(long, default_value_t = 1)]
        link: usize,
        /// Number of phase points over one period.
        #[arg(long, default_value_t = 16)]
        points: usize,
    },
    /// Repeated-transfer process fidelity and its F = A·P^m + 0.25 fit.
    FidelityDecay {
        /// Largest transfer count; counts run 1, 5, 9, …
        #[arg(long, default_value_t = 105)]
        max_transfers: u32,
        /// Enable thermal excitation regardless of the configuration.
        #[arg(long)]
        thermal: bool,
    },
    /// Simulated state and process tomography of one transfer.
    Tomography {
        /// Shots per basis (default from the configuration).
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        noise: bool,
    },
    /// Crosstalk orthogonalization and flux-pulse deconvolution.
    Calibrate {
        /// Step waveform length in samples.
        #[arg(long, default_value_t = 400)]
        samples: usize,
    },
    /// Nelder–Mead refinement of ε and ν against the lab-frame dynamics.
    Optimize {
        #[arg(long, default_value_t = 300)]
        max_iterations: usize,
    },
    /// Re-validate the configuration and its derived quantities.
    SelfCheck,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Synthesize { .. } => "synthesize",
            Command::Evolve { .. } => "evolve",
            Command::Chevron { .. } => "chevron",
            Command::PhaseScan { .. } => "phase-scan",
            Command::FidelityDecay { .. } => "fidelity-decay",
            Command::Tomography { .. } => "tomography",
            Command::Calibrate { .. } => "calibrate",
            Command::Optimize { .. } => "optimize",
            Command::SelfCheck => "self-check",
        }
    }
}

/// 1 for bad input, 2 for numerical failures.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<qst_core::Error>() {
        Some(e) if e.is_validation() => 1,
        Some(_) => 2,
        None if err.downcast_ref::<commands::CheckFailed>().is_some() => 1,
        None => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
