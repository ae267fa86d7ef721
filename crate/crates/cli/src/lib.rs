//! Command-line experiment runner for `korovkin-lab`.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use korovkin_lab::modular::{build_grid, Region};
use korovkin_lab::engine::{verify_p_axioms, PhiMap};
use korovkin_lab::Tolerances;

use crate::config::{ExperimentConfig, MatrixName, SetName, SystemSpec};
pub use crate::error::CliError;

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "KOROVKIN_LAB_THREADS";

/// Interval used by `check-system --system trig` unless overridden.
pub const DEFAULT_TRIG_INTERVAL: (f64, f64) = (0.3, 1.2);

#[derive(Debug, Parser)]
#[command(name = "korovkin-lab", version, about = "Korovkin-type approximation experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Ψ-A density of a column set under the triangular shape.
    Density {
        #[arg(long, value_enum)]
        matrix: MatrixName,
        #[arg(long, value_enum)]
        set: SetName,
        #[arg(long)]
        imax: usize,
    },
    /// Grid check of the test-system conditions.
    CheckSystem {
        #[arg(long, value_enum)]
        system: SystemName,
        #[arg(long)]
        resolution: usize,
        /// Separation for the lower-bound estimate; defaults to the grid spacing.
        #[arg(long)]
        delta_min: Option<f64>,
        /// Dimension of the Euclidean system.
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Interval of the trigonometric system.
        #[arg(long, num_args = 2, value_names = ["A", "B"])]
        interval: Option<Vec<f64>>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SystemName {
    Euclid,
    Trig,
}

/// Caps rayon's global pool from the environment.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_ENV}={raw:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

/// Loads, runs and reports one experiment. Returns whether every expectation held.
pub fn run_config(path: &std::path::Path) -> Result<bool, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let config = ExperimentConfig::from_json(&text)?;
    let results = experiments::run_experiment(&config)?;
    report::emit_report(&results, &config.output_dir)
}

fn print_json(value: &serde_json::Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    println!("{text}");
    Ok(())
}

/// Executes a parsed command and returns the process exit code.
pub fn execute(cli: Cli) -> Result<u8, CliError> {
    configure_threads()?;
    let tol = Tolerances::default();
    match cli.command {
        Command::Run { config } => Ok(if run_config(&config)? { 0 } else { 1 }),
        Command::Density { matrix, set, imax } => {
            let (report, axioms) = experiments::density_summary(matrix, set, imax, &tol)?;
            print_json(&experiments::density_json(matrix, set, imax, &report, &axioms))?;
            Ok(0)
        }
        Command::CheckSystem {
            system,
            resolution,
            delta_min,
            dim,
            interval,
        } => {
            let (spec, region) = match system {
                SystemName::Euclid => (SystemSpec::Euclid { phi_map: PhiMap::Identity }, Region::unit_box(dim)),
                SystemName::Trig => {
                    let (a, b) = interval.map_or(DEFAULT_TRIG_INTERVAL, |v| (v[0], v[1]));
                    (SystemSpec::Trig { a, b }, Region::interval(a, b))
                }
            };
            let grid = build_grid(region, resolution)?;
            let built = experiments::system_of(spec, &grid)?;
            let report = verify_p_axioms(&built, delta_min.unwrap_or(grid.h_min()))?;
            print_json(&experiments::system_json(&built, &report))?;
            Ok(0)
        }
    }
}

/// Entry point shared by the binary: parses `args` and maps every failure
/// to its exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("korovkin-lab: {err}");
            err.exit_code()
        }
    }
}
