//! `pqgame`: run, trace, solve, benchmark and interactively play the
//! quantum-vs-classical games.

mod commands;
mod error;
mod gamefile;
mod play;

use std::io::{self, BufRead, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::EXIT_USAGE;

#[derive(Parser)]
#[command(name = "pqgame", about = "Quantum-vs-classical game runner", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play a game once and print Q's win probability.
    Run {
        /// penny | grover | bv | file:PATH
        selector: String,
        /// Register qubits (grover/bv).
        #[arg(long)]
        n: Option<usize>,
        /// Hidden number, as an integer or an n-length bitstring.
        #[arg(long)]
        a: Option<String>,
        /// Picard's penny strategy: flip | stay | uniform | p=<x>.
        #[arg(long)]
        picard: Option<String>,
        /// Also print a sampled outcome of the final measurement.
        #[arg(long)]
        sample: bool,
        /// Sampling seed (falls back to PQGAME_SEED, then 0).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Emit the per-step entanglement trace as CSV.
    Trace {
        selector: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        a: Option<String>,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the classical restriction of a game.
    Solve {
        selector: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        a: Option<String>,
        /// Exploitability tolerance (default 1e-6).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Benchmark a classical baseline.
    Bench {
        /// classical-guess | classical-bv
        baseline: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Play a game interactively as Picard.
    Play {
        selector: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write a built-in game as a JSON definition file.
    Export {
        selector: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{}", e);
                    0
                }
                _ => {
                    eprint!("{}", e);
                    EXIT_USAGE
                }
            };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = match &cli.command {
        Command::Run {
            selector,
            n,
            a,
            picard,
            sample,
            seed,
        } => commands::cmd_run(
            selector,
            *n,
            a.as_deref(),
            picard.as_deref(),
            *sample,
            *seed,
            &mut out,
        ),
        Command::Trace {
            selector,
            n,
            a,
            out: path,
        } => commands::cmd_trace(selector, *n, a.as_deref(), path.as_deref(), &mut out),
        Command::Solve {
            selector,
            n,
            a,
            tol,
        } => commands::cmd_solve(selector, *n, a.as_deref(), *tol, &mut out),
        Command::Bench {
            baseline,
            n,
            trials,
            seed,
        } => commands::cmd_bench(baseline, *n, *trials, *seed, &mut out),
        Command::Play { selector, n, seed } => {
            let seed = match commands::resolve_seed(*seed) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {}", e);
                    return e.code;
                }
            };
            let stdin = io::stdin();
            let mut input: Box<dyn BufRead> = Box::new(stdin.lock());
            play::cmd_play(selector, *n, seed, &mut input, &mut out)
        }
        Command::Export {
            selector,
            n,
            a,
            out: path,
        } => commands::cmd_export(selector, *n, a.as_deref(), path.as_deref(), &mut out),
    };
    let _ = out.flush();
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e);
            e.code
        }
    }
}
