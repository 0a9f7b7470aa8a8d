//! `ebit`: entanglement of bipartite pure states from the command line.
//!
//! Exit codes: 0 success, 1 property violation found, 2 invalid input,
//! 3 invariant violation in data, 4 I/O failure.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use commands::Failure;
use config::{CommandName, Flags};
use ebit::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "ebit", version, about = "Entanglement of bipartite pure states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Entropy of entanglement of a state file
    Entropy(Flags),
    /// Schmidt coefficients of a state file
    Schmidt(Flags),
    /// Many-copy concentration yield (exact, or sampled with --trials)
    Concentrate(Flags),
    /// Rate–fidelity curve of typical-subspace dilution
    Dilute(Flags),
    /// Randomized LOCC monotonicity sweep
    Monotone(Flags),
    /// Axiom report for the candidate measures
    Measures(Flags),
    /// Per-copy yield convergence table
    Ratio(Flags),
    /// Run whatever a RunConfig file describes
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Shape(_)
        | Error::Capacity { .. }
        | Error::Validation(_)
        | Error::Protocol(_)
        | Error::Parse(_) => 2,
        Error::Norm { .. } | Error::Computation(_) | Error::Consistency(_) => 3,
        Error::Io(_) => 4,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (flags, name) = match cli.command {
        Command::Entropy(f) => (f, Some(CommandName::Entropy)),
        Command::Schmidt(f) => (f, Some(CommandName::Schmidt)),
        Command::Concentrate(f) => (f, Some(CommandName::Concentrate)),
        Command::Dilute(f) => (f, Some(CommandName::Dilute)),
        Command::Monotone(f) => (f, Some(CommandName::Monotone)),
        Command::Measures(f) => (f, Some(CommandName::Measures)),
        Command::Ratio(f) => (f, Some(CommandName::Ratio)),
        Command::Run { config } => (
            Flags {
                config: Some(config),
                ..Flags::default()
            },
            None,
        ),
    };
    let outcome = flags
        .resolve(name)
        .map_err(Failure::from)
        .and_then(|cfg| commands::run(&cfg));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(msg)) => {
            eprintln!("ebit: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Error(e)) => {
            eprintln!("ebit: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
