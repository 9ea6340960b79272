//! Command-line front end: figure data, protocol reports, regime checks and
//! closed-form versus brute-force comparisons.

mod commands;
mod config;
mod output;

pub use config::{indexed_key, Settings};
pub use output::{num, write_atomic, CsvTable};

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::SimError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_REGIME: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_TOLERANCE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "sim", version, about = "Trapped-ion cavity simulations: entropy figures, cat-state protocol, regime checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the entropy curves of a preset figure as CSV
    Figure(FigureArgs),
    /// Run the two-ion cat-state protocol and a fidelity sweep over k
    Nlms(NlmsArgs),
    /// Check the ν ≫ Δ ≫ g hierarchy for a configuration file
    Regime(RegimeArgs),
    /// Compare closed-form and brute-force entropies
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// Figure number
    #[arg(value_parser = clap::value_parser!(u8).range(1..=5))]
    pub id: u8,
    /// Output CSV path [default: figure<ID>.csv]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Number of time points (≥ 1)
    #[arg(long)]
    pub points: Option<usize>,
    /// End of the time axis in units of 1/λ_1
    #[arg(long)]
    pub tmax: Option<f64>,
    /// key=value settings file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override a setting: case, field, ion, ion<k>, lambda<k>, n_ions, n_max_sum, points, tmax
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Ld,
    Both,
}

#[derive(Debug, Args)]
pub struct NlmsArgs {
    /// Phase index: η = √(1/(1+2k)), integer or half-integer
    #[arg(long)]
    pub k: f64,
    /// Initial coherent amplitude of both motional modes
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 1.0)]
    pub g1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub g2: f64,
    #[arg(long, default_value_t = 20.0)]
    pub delta: f64,
    /// Motional ladder size [default: ⌈|α|² + 8|α| + 10⌉]
    #[arg(long)]
    pub n_max: Option<usize>,
    /// k values of the fidelity sweep
    #[arg(long, value_delimiter = ',', default_value = "4,8,12,24")]
    pub sweep: Vec<f64>,
    /// Output prefix: writes <PREFIX>_report.txt and <PREFIX>_sweep.csv
    #[arg(long, default_value = "nlms")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RegimeArgs {
    /// key=value file: n_ions, nu, omega_c, delta, g, eta and per-ion nu<k>, delta<k>, g<k>, eta<k>
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// A: coherent field and ions; B: squeezed field; C: squeezed ions
    #[arg(long)]
    pub case: String,
    #[arg(long, default_value_t = 2)]
    pub n_ions: usize,
    /// Common Fock ladder size of every mode
    #[arg(long, default_value_t = 14)]
    pub n_max: usize,
    /// Largest accepted |closed − numeric|
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    /// End of the time axis in units of 1/λ_1 [default: 4π]
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Field parameter (|α_0| or r_f)
    #[arg(long, default_value_t = 1.0)]
    pub field: f64,
    /// Ion parameter (|α_j| or r_j), shared by all ions
    #[arg(long, default_value_t = 1.0)]
    pub ion: f64,
    /// Rates λ_k / λ_1 [default: 1, 1.25, 1.5, …]
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<f64>>,
    /// Output CSV path [default: compare_<CASE>.csv]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Exit status for a library error.
pub fn exit_code(e: &SimError) -> i32 {
    match e {
        SimError::Regime(_) => EXIT_REGIME,
        SimError::ResourceCap { .. } => EXIT_CAP,
        SimError::Tolerance(_) => EXIT_TOLERANCE,
        _ => EXIT_USAGE,
    }
}

/// Parse arguments, run the command and return the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Figure(a) => commands::figure(a),
        Command::Nlms(a) => commands::nlms(a),
        Command::Regime(a) => commands::regime(a),
        Command::Compare(a) => commands::compare(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
