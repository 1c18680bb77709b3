//! Experiment driver for the aggregation-network performance library.
//!
//! Exit codes: 0 on success, 2 on scenario/usage errors, 3 on numeric or
//! accuracy failures.

mod commands;
mod figures;
mod output;
mod scenario;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::LaplaceChoice;
use crate::output::Table;
use crate::scenario::Scenario;

#[derive(Debug)]
pub enum CliError {
    /// Malformed scenario, override or arguments (exit 2).
    Usage(String),
    /// Numeric or accuracy failure in the computation layer (exit 3).
    Numeric(String),
    Io(String),
}

impl CliError {
    pub fn num(e: aggnet_core::CoreError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Numeric(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<scenario::ScenarioError> for CliError {
    fn from(e: scenario::ScenarioError) -> Self {
        CliError::Usage(e.0)
    }
}

#[derive(Parser)]
#[command(
    name = "aggnet",
    version,
    about = "Analytical metrics and Monte Carlo validation for hybrid uplink aggregation networks"
)]
struct Cli {
    /// Scenario file (TOML sections: network, sim, sweep, output, figure).
    #[arg(long, global = true, value_name = "PATH")]
    scenario: Option<PathBuf>,

    /// Override a scenario field, e.g. --set theta=2 --set sim.runs=1000.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Simulation seed (shorthand for --set seed=N).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory (shorthand for --set path=DIR).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Output format: csv or json.
    #[arg(long, global = true)]
    format: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-channel occupancy distribution per sweep point.
    Pmf,
    /// Interference Laplace transform over an s grid (dB).
    Laplace {
        /// Include the exact nested-quadrature column (slower).
        #[arg(long)]
        exact: bool,
    },
    /// Analytic success probabilities per scheme and sweep point.
    Success {
        /// Transform path for random scheduling: exact or weighted.
        #[arg(long, default_value = "exact")]
        laplace: String,
    },
    /// Full analytic metric set (success, served devices, power).
    Metrics {
        #[arg(long, default_value = "exact")]
        laplace: String,
    },
    /// Fair-coexistence power budget per sweep point.
    DeltaStar,
    /// Monte Carlo estimation of the full metric set.
    Simulate,
    /// Reproduce the data behind one figure: 2, 3, 4, 5, 6a, 6b, 7a, 7b.
    Figure { id: String },
}

fn load_scenario(cli: &Cli) -> Result<Scenario, CliError> {
    let mut sc = match &cli.scenario {
        Some(path) => Scenario::from_file(path)?,
        None => Scenario::default_scenario(),
    };
    for spec in &cli.set {
        sc.apply_override(spec)?;
    }
    if let Some(seed) = cli.seed {
        sc.sim.seed = seed;
    }
    if let Some(out) = &cli.out {
        sc.out_dir = out.display().to_string();
    }
    if let Some(f) = &cli.format {
        sc.format = f.parse()?;
    }
    sc.params
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(sc)
}

fn write_tables(sc: &Scenario, tables: Vec<Table>) -> Result<(), CliError> {
    let dir = PathBuf::from(&sc.out_dir);
    for t in tables {
        let path = t
            .write(&dir, sc.format)
            .map_err(|e| CliError::Io(e.to_string()))?;
        println!("wrote {} ({} rows)", path.display(), t.rows.len());
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let sc = load_scenario(cli)?;
    let tables = match &cli.command {
        Command::Pmf => vec![commands::cmd_pmf(&sc)?],
        Command::Laplace { exact } => vec![commands::cmd_laplace(&sc, *exact)?],
        Command::Success { laplace } => {
            vec![commands::cmd_success(&sc, laplace.parse::<LaplaceChoice>()?)?]
        }
        Command::Metrics { laplace } => {
            vec![commands::cmd_metrics(&sc, laplace.parse::<LaplaceChoice>()?)?]
        }
        Command::DeltaStar => vec![commands::cmd_delta_star(&sc)?],
        Command::Simulate => vec![commands::cmd_simulate(&sc)?],
        Command::Figure { id } => figures::run_figure(id, &sc)?,
    };
    write_tables(&sc, tables)
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Numeric(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
        Err(CliError::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
