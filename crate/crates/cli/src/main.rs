//! `chargeq` command-line driver.
//!
//! Every command first prints its fully resolved configuration as a `#`
//! comment line that can be pasted back to rerun it.

mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const FAILURE: u8 = 1;
    pub const PARSE: u8 = 2;
    pub const DOF: u8 = 3;
    pub const UNCONVERGED: u8 = 4;
}

#[derive(Debug, Parser)]
#[command(
    name = "chargeq",
    version,
    about = "Pulse-level gate synthesis for Josephson charge-qubit registers"
)]
pub struct Cli {
    /// Worker threads for restarts, scan cells and noise trials.
    #[arg(long, global = true, env = "CHARGEQ_WORKERS")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagate a control-path table and report gate errors.
    Simulate(SimulateArgs),
    /// Synthesize a control path for a target gate.
    Optimize(OptimizeArgs),
    /// Planar cut of the error function around a path.
    Scan(ScanArgs),
    /// Gate error under Gaussian control noise.
    Sensitivity(SensitivityArgs),
    /// Execution-time comparison in loop-time units.
    Cost(CostArgs),
}

/// Register model and propagator settings shared by all path commands.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Coupling-sum reading: ordered, unordered (simulate also accepts both).
    #[arg(long)]
    convention: Option<String>,
    /// Coupling constant C.
    #[arg(long, default_value_t = 1.0)]
    coupling: f64,
    /// Midpoint-rule steps per unit segment.
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Short-time exponential: spectral, taylor, taylorN (N in 3..=12).
    #[arg(long, default_value = "spectral")]
    backend: String,
    /// Independent sub-products of the propagator.
    #[arg(long, default_value_t = 1)]
    chunks: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Control-path table.
    #[arg(long)]
    path: String,
    /// Target gate (fredkin, toffoli, qft3, cnot, swap, cv, identity-N).
    #[arg(long)]
    target: String,
    #[command(flatten)]
    model: ModelArgs,
    /// Also print the propagated unitary.
    #[arg(long)]
    print_unitary: bool,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    target: String,
    /// Interior control points (default: 2, 4, 12 for 1, 2, 3 qubits).
    #[arg(long)]
    nu: Option<usize>,
    /// Budget preset: quick or full.
    #[arg(long, default_value = "quick")]
    mode: String,
    #[command(flatten)]
    model: ModelArgs,
    /// Error mode: best, phase-free or fixed-J.
    #[arg(long, default_value = "best")]
    error_mode: String,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    max_restarts: Option<usize>,
    /// Evaluation budget of one restart.
    #[arg(long)]
    restart_evals: Option<usize>,
    /// Total evaluation budget (0 for none).
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = chargeq::DEFAULT_AMPLITUDE_BOUND)]
    amplitude_bound: f64,
    #[arg(long, default_value_t = 2.0)]
    start_amplitude: f64,
    #[arg(long, default_value_t = 0.5)]
    simplex_scale: f64,
    /// Nelder-Mead coefficients: auto, classical or adaptive.
    #[arg(long, default_value = "auto")]
    coefficients: String,
    /// Best path output table (default: <target>_best.csv).
    #[arg(long)]
    out: Option<String>,
    /// Also write the run report to this file.
    #[arg(long)]
    report: Option<String>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Center path table.
    #[arg(long)]
    path: String,
    #[arg(long)]
    target: String,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value = "best")]
    error_mode: String,
    #[arg(long, default_value_t = 0.1)]
    half_width: f64,
    /// Cells per side (odd).
    #[arg(long, default_value_t = 21)]
    grid: usize,
    /// Seed of the random orthonormal scan plane.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// File with two whitespace-separated direction vectors, one per line,
    /// used instead of a random plane.
    #[arg(long)]
    directions: Option<String>,
    /// Output grid file (default: stdout).
    #[arg(long)]
    out: Option<String>,
}

#[derive(Debug, Args)]
pub struct SensitivityArgs {
    #[arg(long)]
    path: String,
    #[arg(long)]
    target: String,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value = "best")]
    error_mode: String,
    /// Comma-separated noise rms levels.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "1e-4,3e-4,1e-3,3e-3,1e-2"
    )]
    rms: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
pub struct CostArgs {
    /// Two-qubit gate count of a custom sequence.
    #[arg(long)]
    two: Option<u64>,
    /// Three-qubit gate count of a custom sequence.
    #[arg(long)]
    three: Option<u64>,
}

fn default_workers(cli: &Cli) -> usize {
    cli.workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1)
}

fn execute(cli: &Cli, workers: usize, out: &mut dyn Write) -> commands::Result<u8> {
    match &cli.command {
        Command::Simulate(a) => commands::simulate(out, a, workers),
        Command::Optimize(a) => commands::optimize(out, a, workers),
        Command::Scan(a) => commands::scan(out, a, workers),
        Command::Sensitivity(a) => commands::sensitivity(out, a, workers),
        Command::Cost(a) => commands::cost(out, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = default_workers(&cli);
    // A second initialisation only fails if a pool already exists.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global();
    let stdout = std::io::stdout();
    match execute(&cli, workers, &mut stdout.lock()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests;
