//! Command-line front end: run a named experiment to CSV, list the
//! experiments, or validate a config file.
//!
//! Exit codes: 0 on success, 2 on config or usage errors (including clap's
//! own usage failures), 1 on runtime errors.

use clap::{Parser, Subcommand};
use cogbeam::harness::{run_experiment, EstimatorKind, ExperimentName, ExperimentSpec, HarnessError};
use cogbeam::scenario::SystemConfig;
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "cogbeam", version, about = "Link-level simulator for learning-based cognitive beamforming")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its CSV table.
    Run {
        /// Experiment name; see `cogbeam list`.
        experiment: String,
        /// Config file (flat `key = value` lines) replacing the built-in
        /// parameter set.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Base RNG seed; trial t uses seed + t.
        #[arg(long)]
        seed: Option<u64>,
        /// Monte-Carlo trials per sweep point.
        #[arg(long)]
        trials: Option<usize>,
        /// Subspace estimator: known_noise, unknown_noise, or oracle.
        #[arg(long)]
        estimator: Option<String>,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the available experiments.
    List,
    /// Check a config file against the model invariants.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(msg) | Failure::Runtime(msg) => f.write_str(msg),
        }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::UnknownExperiment(_)
            | HarnessError::UnknownEstimator(_)
            | HarnessError::InvalidSpec(_)
            | HarnessError::Scenario(_) => Failure::Config(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn load_config(path: &Path) -> Result<SystemConfig, Failure> {
    SystemConfig::from_file(path)
        .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::List => {
            for name in ExperimentName::ALL {
                println!("{:<24} {}", name.as_str(), name.description());
            }
            Ok(())
        }
        Command::Validate { config } => {
            load_config(&config)?;
            println!("{}: ok", config.display());
            Ok(())
        }
        Command::Run {
            experiment,
            config,
            seed,
            trials,
            estimator,
            out,
        } => {
            let name: ExperimentName = experiment.parse().map_err(Failure::from)?;
            let mut spec = ExperimentSpec::default_for(name);
            if let Some(path) = &config {
                spec.config = load_config(path)?;
            }
            if let Some(seed) = seed {
                spec.seed = seed;
            }
            if let Some(trials) = trials {
                spec.trials = trials;
            }
            if let Some(kind) = &estimator {
                spec.estimator = kind.parse::<EstimatorKind>().map_err(Failure::from)?;
            }
            let table = run_experiment(&spec).map_err(Failure::from)?;
            let csv = table.to_csv_string();
            match out {
                Some(path) => std::fs::write(&path, csv)
                    .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?,
                None => print!("{csv}"),
            }
            Ok(())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(failure) = execute(cli) {
        eprintln!("error: {failure}");
        std::process::exit(failure.code());
    }
}
