//! `tprh`: spectra, Juddian points and level-crossing tables for the
//! two-photon Rabi model.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "tprh", version, about = "Two-photon Rabi model spectra, Juddian points and crossing tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lowest levels of the four symmetry sectors along a coupling sweep.
    Spectrum(SpectrumArgs),
    /// The first twelve Juddian points at ω = 1/2, ω0 = 1, checked against the embedded reference.
    Table1(Table1Args),
    /// Juddian points for a range of orders N.
    Judd(JuddArgs),
    /// Closed-form versus numerical spectrum of the ω0 = 0 model.
    Degenerate(DegenerateArgs),
    /// Detect, label and classify level crossings in a coupling window.
    Crossings(CrossingsArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Physics {
    /// Boson frequency ω.
    #[arg(long, default_value_t = 0.5)]
    pub omega: f64,
    /// Atomic splitting ω0.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub omega0: f64,
}

#[derive(Debug, Clone, Args)]
pub struct Couplings {
    /// Rescaled couplings λ = 2g/ω, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "g")]
    pub lambda: Vec<f64>,
    /// Physical couplings g, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub g: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct Basis {
    /// Fock cut-off of the truncated basis.
    #[arg(long, conflicts_with = "auto_converge")]
    pub nmax: Option<usize>,
    /// Grow the cut-off until the requested levels converge.
    #[arg(long)]
    pub auto_converge: bool,
    /// Convergence tolerance for --auto-converge.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub physics: Physics,
    #[command(flatten)]
    pub couplings: Couplings,
    /// Coupling window a,b in λ (ignored when --lambda or --g is given).
    #[arg(long, value_parser = parse_window)]
    pub window: Option<(f64, f64)>,
    /// Number of grid points across the window.
    #[arg(long, default_value_t = 400)]
    pub grid: usize,
    /// Levels per sector.
    #[arg(long, default_value_t = 12)]
    pub levels: usize,
    #[command(flatten)]
    pub basis: Basis,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct Table1Args {
    #[command(flatten)]
    pub physics: Physics,
    /// Bracketing grid of the root search.
    #[arg(long, default_value_t = 2000)]
    pub grid: usize,
    /// Relative tolerance of the reference comparison.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Fock cut-off for the wavefunction check.
    #[arg(long)]
    pub nmax: Option<usize>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct JuddArgs {
    #[command(flatten)]
    pub physics: Physics,
    /// Orders a,b (inclusive).
    #[arg(long = "N-range", value_parser = parse_range, default_value = "2,7")]
    pub n_range: (usize, usize),
    /// Coupling window a,b in λ for the root search.
    #[arg(long, value_parser = parse_window)]
    pub window: Option<(f64, f64)>,
    /// Bracketing grid of the root search.
    #[arg(long, default_value_t = 2000)]
    pub grid: usize,
    /// Check each point and its mirror partner in the full basis.
    #[arg(long)]
    pub verify: bool,
    /// Fock cut-off for --verify.
    #[arg(long)]
    pub nmax: Option<usize>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct DegenerateArgs {
    /// Boson frequency ω (ω0 is fixed to zero).
    #[arg(long, default_value_t = 0.5)]
    pub omega: f64,
    #[command(flatten)]
    pub couplings: Couplings,
    /// Levels compared per coupling.
    #[arg(long, default_value_t = 6)]
    pub levels: usize,
    /// Convergence tolerance of the numerical levels.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct CrossingsArgs {
    #[command(flatten)]
    pub physics: Physics,
    /// Coupling window a,b in λ.
    #[arg(long, value_parser = parse_window)]
    pub window: Option<(f64, f64)>,
    /// Number of grid points across the window.
    #[arg(long, default_value_t = 400)]
    pub grid: usize,
    /// Levels per sector.
    #[arg(long, default_value_t = 12)]
    pub levels: usize,
    #[command(flatten)]
    pub basis: Basis,
    #[command(flatten)]
    pub output: Output,
}

fn parse_pair<T: std::str::FromStr>(s: &str) -> Result<(T, T), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected a,b but got {s:?}"))?;
    let parse = |x: &str| x.trim().parse::<T>().map_err(|_| format!("cannot parse {x:?}"));
    Ok((parse(a)?, parse(b)?))
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    parse_pair(s)
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    parse_pair(s)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
