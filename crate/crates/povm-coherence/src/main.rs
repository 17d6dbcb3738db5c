//! Thin command-line front end; all logic lives in the library.
//!
//! Exit codes: 0 success, 1 reproduction-check failure, 2 parse error,
//! 3 validation error, 4 internal numerical inconsistency.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use povm_coherence::cli::{
    effective_config, parse_grid, reference_problem_json, run_coherence, run_dynamical,
    run_reference_checks, run_sweep, sweep_to_csv,
};
use povm_coherence::problem::{parse_problem, Problem};
use povm_coherence::Error;

#[derive(Parser)]
#[command(
    name = "povm-coherence",
    version,
    about = "POVM-based coherence of states and a coherence measure for channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Optimizer seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Simplex refinements per optimization.
    #[arg(long, global = true)]
    restarts: Option<usize>,

    /// Qubit search grid, "N" or "AxBxC" over (p, theta, phi).
    #[arg(long, global = true)]
    grid: Option<String>,

    /// Certification budget tolerance.
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    /// Output file (CSV for sweep, JSON record otherwise).
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Coherence of a named state with respect to the problem POVM.
    Coherence {
        /// Problem file (JSON).
        problem: PathBuf,
        /// Name of a state from the problem file.
        state: String,
    },
    /// Coherence over a pure-state grid, written as CSV.
    Sweep {
        problem: PathBuf,
        /// Also evaluate the coherence after this channel.
        #[arg(long)]
        channel: Option<String>,
        #[arg(long, default_value_t = 61)]
        n_theta: usize,
        #[arg(long, default_value_t = 61)]
        n_phi: usize,
    },
    /// Channel coherence measure with witness and certification verdict.
    Dynamical {
        problem: PathBuf,
        /// Name of a channel from the problem file.
        channel: String,
    },
    /// Run every closed-form check of the bundled reference example.
    Repro {
        #[arg(long, hide = true)]
        corrupt_fixture: bool,
        /// Write the bundled example as a problem file and exit.
        #[arg(long)]
        emit_problem: bool,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    if err.is_parse() {
        2
    } else if err.is_internal() {
        4
    } else {
        3
    }
}

fn fail(err: &Error) -> ExitCode {
    eprintln!("error[{}]: {}", err.code(), err);
    ExitCode::from(exit_code_for(err))
}

fn load_problem(path: &PathBuf) -> Result<Problem, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_problem(&text)
}

fn write_output(path: &PathBuf, content: &str) -> Result<(), Error> {
    std::fs::write(path, content).map_err(|e| Error::Internal {
        what: "cannot write output file",
        value: e.raw_os_error().unwrap_or(0) as f64,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let grid = match cli.grid.as_deref().map(parse_grid).transpose() {
        Ok(g) => g,
        Err(e) => return fail(&e),
    };

    match &cli.command {
        Command::Coherence { problem, state } => {
            let problem = match load_problem(problem) {
                Ok(p) => p,
                Err(e) => return fail(&e),
            };
            match run_coherence(&problem, state) {
                Ok(report) => {
                    println!("{report}");
                    if let Some(path) = &cli.output {
                        if let Err(e) = write_output(path, &(report.to_json() + "\n")) {
                            return fail(&e);
                        }
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Sweep {
            problem,
            channel,
            n_theta,
            n_phi,
        } => {
            let problem = match load_problem(problem) {
                Ok(p) => p,
                Err(e) => return fail(&e),
            };
            match run_sweep(&problem, channel.as_deref(), *n_theta, *n_phi) {
                Ok(table) => {
                    let csv = sweep_to_csv(&table);
                    match &cli.output {
                        Some(path) => {
                            if let Err(e) = write_output(path, &csv) {
                                return fail(&e);
                            }
                        }
                        None => print!("{csv}"),
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Dynamical { problem, channel } => {
            let problem = match load_problem(problem) {
                Ok(p) => p,
                Err(e) => return fail(&e),
            };
            let cfg = effective_config(Some(&problem), cli.seed, cli.restarts, grid, cli.tolerance);
            match run_dynamical(&problem, channel, &cfg) {
                Ok(report) => {
                    println!("{report}");
                    if let Some(path) = &cli.output {
                        if let Err(e) = write_output(path, &(report.to_json() + "\n")) {
                            return fail(&e);
                        }
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Repro {
            corrupt_fixture,
            emit_problem,
        } => {
            if *emit_problem {
                return match reference_problem_json() {
                    Ok(json) => {
                        match &cli.output {
                            Some(path) => {
                                if let Err(e) = write_output(path, &json) {
                                    return fail(&e);
                                }
                            }
                            None => print!("{json}"),
                        }
                        ExitCode::SUCCESS
                    }
                    Err(e) => fail(&e),
                };
            }
            match run_reference_checks(*corrupt_fixture) {
                Ok(report) => {
                    println!("{report}");
                    if report.all_passed() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => fail(&e),
            }
        }
    }
}
