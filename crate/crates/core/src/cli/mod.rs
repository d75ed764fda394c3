//! Command-line front end.
//!
//! Exit statuses: 0 success, 1 verification failure, 2 usage or configuration error.

pub mod commands;
pub mod config;
pub mod verify;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::synthesis::SynthesisMethod;

pub use config::RunConfig;

/// Default output directory when no path is given on the command line.
pub const OUT_DIR_ENV: &str = "PLANCK_NOISE_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "planck-noise", version, about = "Planckian interferometer noise: prediction, simulation and detection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the predicted displacement spectrum.
    Spectrum(SpectrumArgs),
    /// Synthesize one geometric-noise time series.
    Synth(SynthArgs),
    /// Simulate two interferometers and run the correlation analysis.
    Run(RunArgs),
    /// Print the reference run configuration as JSON.
    DefaultConfig(DefaultConfigArgs),
    /// Check the algebra and spectrum against their closed-form claims.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeriesFormatArg {
    Bin,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Spectral,
    Boxcar,
}

impl From<MethodArg> for SynthesisMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Spectral => SynthesisMethod::Spectral,
            MethodArg::Boxcar => SynthesisMethod::Boxcar,
        }
    }
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long, default_value_t = 40.0)]
    pub arm_length: f64,
    #[arg(long, default_value_t = 0.0)]
    pub f_min: f64,
    #[arg(long)]
    pub f_max: f64,
    #[arg(long, default_value_t = 1001)]
    pub n_points: usize,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
    /// Write here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// JSON synthesis config; flags given alongside override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub arm_length: Option<f64>,
    #[arg(long)]
    pub sample_rate: Option<f64>,
    #[arg(long)]
    pub n_samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long, value_enum, default_value_t = SeriesFormatArg::Bin)]
    pub format: SeriesFormatArg,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DefaultConfigArgs {
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Emit the report as JSON.
    #[arg(long)]
    pub json: bool,
}

/// Parses `std::env::args`, runs the command and returns the exit status.
pub fn main() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match commands::dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
