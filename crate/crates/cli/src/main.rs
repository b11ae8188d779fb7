use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod report;

use config::{Format, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Core(singmetric_core::Error),
    Validation(String),
    Io(String),
}

impl From<singmetric_core::Error> for CliError {
    fn from(e: singmetric_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        use singmetric_core::Error as E;
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 5,
            CliError::Core(e) => match e {
                E::Parameter(_) | E::Domain(_) | E::Input(_) | E::Configuration(_) => 2,
                E::MeshResolution(_) | E::Numerical(_) => 3,
                E::InsufficientData(_) => 4,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Validation(m) => write!(f, "invalid configuration: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

/// Spectral experiments for the metric σ^{-2γ}|dx|² on the unit disc.
#[derive(Parser, Debug)]
#[command(name = "singmetric", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON file of settings; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    run: RunConfig,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Lowest Dirichlet eigenvalues of the radial problem
    Spectrum,
    /// Convergence rate of truncated eigenvalues
    Rate,
    /// Numerical sharp Hardy constant under mesh refinement
    Hardy,
    /// Collar volumes and the interior Minkowski exponent
    Minkowski,
    /// Graph shortest-path distance to the boundary
    Geodesic,
    /// Boundary decay of an eigenfunction
    Decay,
    /// Schrödinger potential in closed and derivative form
    Potential,
    /// Bound constants, operator-norm chain and fractional-power order
    Bounds,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let base = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let cfg = cli.run.over(base);
    let report = match cli.command {
        Command::Spectrum => commands::spectrum(&cfg),
        Command::Rate => commands::rate(&cfg),
        Command::Hardy => commands::hardy(&cfg),
        Command::Minkowski => commands::minkowski(&cfg),
        Command::Geodesic => commands::geodesic(&cfg),
        Command::Decay => commands::decay(&cfg),
        Command::Potential => commands::potential(&cfg),
        Command::Bounds => commands::bounds(&cfg),
    }?;
    let text = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => report.table.to_csv(),
        Format::Json => report::to_json(report.json),
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("singmetric: {e}");
            ExitCode::from(e.code())
        }
    }
}
