use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use phaselimit::config::parse_config;
use phaselimit::error::Error;
use phaselimit::scenario::{run_scenario, write_artifacts};
use phaselimit::verify::run_all;

/// Phase-space speed limits: scenario runner and self-check suite.
#[derive(Parser)]
#[command(name = "phaselimit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a config file and write series.csv / summary.txt.
    Run {
        /// Path to the scenario config.
        config: PathBuf,
        /// Output directory for the artifacts.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the full oracle/grid cross-validation suite.
    VerifyAll {
        /// Base grid resolution per axis.
        #[arg(long = "grid-n", default_value_t = 512)]
        grid_n: usize,
    },
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn classify(err: &Error) -> u8 {
    match err {
        Error::Config { .. } | Error::InvalidArgument(_) | Error::Io(_) => EXIT_CONFIG,
        _ => EXIT_NUMERIC,
    }
}

fn cmd_run(config: PathBuf, out: PathBuf) -> ExitCode {
    let text = match std::fs::read_to_string(&config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read config {}: {e}", config.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let outcome = match run_scenario(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(classify(&e));
        }
    };
    if let Err(e) = write_artifacts(&out, &cfg, &outcome) {
        eprintln!("error: cannot write artifacts to {}: {e}", out.display());
        return ExitCode::from(1);
    }
    print!("{}", outcome.summary);
    if let Some((kind, index, margin)) = outcome.violation {
        eprintln!(
            "error: {} dominance violated at time index {index} (margin {margin:.6})",
            kind.label()
        );
        return ExitCode::from(EXIT_NUMERIC);
    }
    if !outcome.passed {
        return ExitCode::from(EXIT_NUMERIC);
    }
    ExitCode::SUCCESS
}

fn cmd_verify_all(grid_n: usize) -> ExitCode {
    let outcomes = run_all(grid_n);
    let mut failed = Vec::new();
    for o in &outcomes {
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {:<32} {}", o.name, o.detail);
        if !o.passed {
            failed.push(o.name);
        }
    }
    println!("{} / {} checks passed", outcomes.len() - failed.len(), outcomes.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("failing checks: {}", failed.join(", "));
        ExitCode::FAILURE
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out } => cmd_run(config, out),
        Command::VerifyAll { grid_n } => cmd_verify_all(grid_n),
    }
}
