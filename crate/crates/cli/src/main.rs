//! `hammerloc`: certify, solve and inspect two-component Hammerstein
//! systems described by JSON problem files.

mod commands;
mod output;
mod problem;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use problem::MethodName;

#[derive(Parser)]
#[command(name = "hammerloc", version, about = "Localization certificates and Nyström solves for Hammerstein systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the integral conditions and write certificate.json and certificate.txt.
    Certify(CommonArgs),
    /// Solve the system and check where the solution lands.
    Solve(SolveArgs),
    /// Verify both kernels against their envelopes and cone constants.
    KernelReport(CommonArgs),
    /// Solve from a lattice of starting amplitudes and keep the distinct solutions.
    MultiStart(SolveArgs),
}

#[derive(Args)]
pub struct CommonArgs {
    /// Problem file, or the name of a bundled example (numex, ex2).
    pub problem: PathBuf,
    /// Grid points on [0, 1].
    #[arg(long, value_name = "N")]
    pub grid: Option<usize>,
    /// Solver residual tolerance, or margin tolerance for certify.
    #[arg(long, value_name = "X")]
    pub tol: Option<f64>,
    /// Directory for output files.
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    /// Leave the generation time out of output files.
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub method: Option<MethodName>,
    /// Number of nonzero starting amplitudes.
    #[arg(long, value_name = "COUNT")]
    pub multi_start: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Certify(a) => commands::certify(&a),
        Command::Solve(a) if a.multi_start.is_some() => commands::multi_start(&a),
        Command::Solve(a) => commands::solve(&a),
        Command::KernelReport(a) => commands::kernel_report(&a),
        Command::MultiStart(a) => commands::multi_start(&a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
