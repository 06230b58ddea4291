//! `falqon`: run feedback-based solvers and benchmark plans from JSON files.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use falqon_core::algorithms::Algorithm;

/// Environment variable holding the worker count for sweeps.
pub const WORKERS_ENV: &str = "FALQON_WORKERS";

#[derive(Parser, Debug)]
#[command(
    name = "falqon",
    version,
    about = "Feedback-based quantum optimization with constraints"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
enum AlgorithmArg {
    Falqon,
    FalqonC,
    FalqonIc,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Falqon => Algorithm::Falqon,
            AlgorithmArg::FalqonC => Algorithm::FalqonC,
            AlgorithmArg::FalqonIc => Algorithm::FalqonIc,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one solver and write the trajectory, histogram and manifest.
    Solve {
        problem: PathBuf,
        config: PathBuf,
        /// Output directory.
        #[arg(short, long, default_value = "out")]
        out: PathBuf,
        /// Config override as a dotted path, e.g. `observable.gamma=[4]`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Convert a constrained problem to a penalized QUBO.
    Convert {
        problem: PathBuf,
        /// IC penalty weights, one per invalid configuration.
        #[arg(long = "gamma", value_delimiter = ',')]
        gammas: Vec<f64>,
        /// Equality penalty weights, one per equality after inequality conversion.
        #[arg(long = "beta", value_delimiter = ',')]
        betas: Vec<f64>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Brute-force spectrum summary and optimal set.
    Spectrum {
        problem: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Qubit and gate counts of one layer.
    Resources {
        problem: PathBuf,
        #[arg(long, value_enum)]
        algorithm: AlgorithmArg,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark plan and write its tables.
    Experiment {
        plan: PathBuf,
        #[arg(short, long, default_value = "out")]
        out: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Largest step size keeping every instance of a plan monotone.
    TuneDt {
        plan: PathBuf,
        /// Descending candidate list; defaults to a geometric grid from the stability bound.
        #[arg(long, value_delimiter = ',')]
        grid: Vec<f64>,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve {
            problem,
            config,
            out,
            overrides,
        } => commands::solve(&problem, &config, &out, &overrides),
        Command::Convert {
            problem,
            gammas,
            betas,
            out,
        } => commands::convert(&problem, &gammas, &betas, out.as_deref()),
        Command::Spectrum { problem, out } => commands::spectrum(&problem, out.as_deref()),
        Command::Resources {
            problem,
            algorithm,
            out,
        } => commands::resources(&problem, algorithm.into(), out.as_deref()),
        Command::Experiment {
            plan,
            out,
            overrides,
        } => commands::experiment(&plan, &out, &overrides),
        Command::TuneDt {
            plan,
            grid,
            out,
            overrides,
        } => commands::tune_dt(&plan, &grid, out.as_deref(), &overrides),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.code as u8)
        }
    }
}
