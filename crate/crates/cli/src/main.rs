//! `weakphase` command-line interface.
//!
//! Exit codes: 0 success, 2 invalid input or configuration, 3 numerical-domain error
//! (orthogonal selection, non-SIC fiducial, ...). Diagnostics go to stderr only.

mod commands;
mod inputs;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use weakphase_core::Error;

const VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    " (census_tol=1e-8; x-grid=[-8σ, 8σ+g] x 4096; p-grid=[-8/(2σ), 8/(2σ)] x 4096; overlap_floor=1e-12)"
);

#[derive(Debug, Parser)]
#[command(name = "weakphase", version = VERSION, about = "Weak values, Bargmann invariants, geometric phases and SIC-POVM triple phases")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Weak value of an observable or projector between pre- and post-selected states.
    WeakValue(commands::WeakValueArgs),
    /// Bargmann invariant and polyline phase of an ordered list of states.
    Bargmann(commands::BargmannArgs),
    /// Geometric phase of the geodesic triangle through three states.
    TrianglePhase(commands::TriangleArgs),
    /// Build a SIC set (built-in d = 2, 3 or from a fiducial file).
    SicGenerate(commands::SicGenerateArgs),
    /// Cluster the triple phases of a SIC set by cos θ.
    SicCensus(commands::SicCensusArgs),
    /// SIC expansion coefficients of a pure state and the purity residual Tr ρ³ − 1.
    SicPurity(commands::SicPurityArgs),
    /// Exact pointer state after coupling to a projector and post-selecting.
    Pointer(commands::PointerArgs),
    /// Shot-based strong–weak–strong protocol on a SIC triple.
    Protocol(commands::ProtocolArgs),
}

/// SIC set selection shared by the `sic-*` and `protocol` commands.
#[derive(Debug, Args, Clone)]
pub struct SicSelect {
    /// Dimension of a built-in SIC set (2 or 3).
    #[arg(long)]
    pub dim: Option<usize>,
    /// JSON ket file holding a Weyl–Heisenberg fiducial.
    #[arg(long, conflicts_with = "dim")]
    pub fiducial: Option<std::path::PathBuf>,
}

/// Error with the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_numerical_domain() => 3,
            CliError::Core(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::WeakValue(a) => commands::weak_value(a),
        Command::Bargmann(a) => commands::bargmann(a),
        Command::TrianglePhase(a) => commands::triangle_phase(a),
        Command::SicGenerate(a) => commands::sic_generate(a),
        Command::SicCensus(a) => commands::sic_census(a),
        Command::SicPurity(a) => commands::sic_purity(a),
        Command::Pointer(a) => commands::pointer(a),
        Command::Protocol(a) => commands::protocol(a),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
