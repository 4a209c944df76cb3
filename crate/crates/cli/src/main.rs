//! Command-line runner for the verification experiments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hadamard::config::{Experiment, ExperimentConfig};
use hadamard::experiment;

#[derive(Parser, Debug)]
#[command(name = "hadamard", version, about = "Run curvature verification experiments and write CSV artifacts")]
struct Cli {
    /// Experiment config file (`key = value` lines under `[section]` headers).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (HADAMARD_OUT takes precedence).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Print each experiment with the properties and operations it checks.
    #[arg(long)]
    list: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    SpacesSelftest,
    TransportHolonomy,
    CurveTau,
    ChordFit,
    TwoPoint,
    Majorize,
    SchurSuite,
    ChernLashof,
    ParallelFlow,
    KleinerChain,
    GaussMap,
    Develop,
    HullAperture,
    All,
}

impl From<Command> for Experiment {
    fn from(c: Command) -> Self {
        match c {
            Command::SpacesSelftest => Experiment::SpacesSelftest,
            Command::TransportHolonomy => Experiment::TransportHolonomy,
            Command::CurveTau => Experiment::CurveTau,
            Command::ChordFit => Experiment::ChordFit,
            Command::TwoPoint => Experiment::TwoPoint,
            Command::Majorize => Experiment::Majorize,
            Command::SchurSuite => Experiment::SchurSuite,
            Command::ChernLashof => Experiment::ChernLashof,
            Command::ParallelFlow => Experiment::ParallelFlow,
            Command::KleinerChain => Experiment::KleinerChain,
            Command::GaussMap => Experiment::GaussMap,
            Command::Develop => Experiment::Develop,
            Command::HullAperture => Experiment::HullAperture,
            Command::All => Experiment::All,
        }
    }
}

fn list() {
    for entry in experiment::manifest() {
        println!("{}", entry.experiment);
        for p in entry.properties {
            println!("  checks: {p}");
        }
        if !entry.operations.is_empty() {
            println!("  operations: {}", entry.operations.join(", "));
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list {
        list();
        return ExitCode::SUCCESS;
    }
    let mut cfg = match &cli.config {
        Some(path) => match std::fs::read_to_string(path).map_err(hadamard::Error::from).and_then(|t| ExperimentConfig::parse(&t)) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("hadamard: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
        None => ExperimentConfig::new(Experiment::All),
    };
    match (cli.command, &cli.config) {
        (Some(c), _) => cfg.experiment = c.into(),
        (None, Some(_)) => {}
        (None, None) => {
            eprintln!("hadamard: no experiment given (pass a subcommand, --config or --list)");
            return ExitCode::from(2);
        }
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = cli.out {
        cfg.out = o;
    }
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global() {
            eprintln!("hadamard: {e}");
            return ExitCode::from(2);
        }
    }
    let out_dir = cfg.output_dir();
    let outcome = match experiment::run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("hadamard: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = outcome.write(&out_dir) {
        eprintln!("hadamard: writing {}: {e}", out_dir.display());
        return ExitCode::from(2);
    }
    let failures = outcome.failures();
    println!("{}: {} rows, {} failed -> {}", cfg.experiment, outcome.rows.len(), failures, out_dir.join("results.csv").display());
    for r in outcome.rows.iter().filter(|r| !r.pass) {
        println!("  FAIL {} #{} {} {}: {} {}", r.experiment, r.instance, r.fixture, r.quantity, r.measured, r.detail);
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
