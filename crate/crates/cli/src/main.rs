// SPDX-License-Identifier: Apache-2.0

//! `rwaa`: solve, compare, export and verify wavelength-minimal designs for
//! optical networks, with or without in-network aggregation.

mod commands;
mod exit;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rwaa_core::Mode;

use crate::exit::Failure;

#[derive(Parser)]
#[command(
    name = "rwaa",
    version,
    about = "Routing, wavelength and aggregation assignment for optical networks"
)]
#[command(
    after_help = "Exit codes: 0 optimal or passed, 1 verification failed, 2 infeasible, \
64 usage, 65 bad data, 66 missing input, 73 cannot create output."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find a design using the fewest wavelengths.
    Solve(SolveArgs),
    /// Tabulate bypass against aggregation for all-to-one traffic.
    Compare(CompareArgs),
    /// Write the integer program for an instance in LP format.
    ExportLp(ExportArgs),
    /// Check a solution record or solver assignment against an instance.
    Verify(VerifyArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Traffic {
    /// Demand file: one `<src> <dst>` pair per line.
    #[arg(long, value_name = "PATH")]
    demands: Option<PathBuf>,
    /// One demand from every other node to NODE.
    #[arg(long, value_name = "NODE")]
    all_to_one: Option<u32>,
}

#[derive(Args)]
struct Instance {
    /// Topology file (`name`, `nodes N`, one undirected edge `u v` per line).
    #[arg(long, value_name = "PATH")]
    topology: PathBuf,
    #[command(flatten)]
    traffic: Traffic,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Bypass,
    Aggregation,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Bypass => Mode::Bypass,
            ModeArg::Aggregation => Mode::Aggregation,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Record,
}

#[derive(Args)]
struct SearchArgs {
    /// Wavelengths available per fiber.
    #[arg(long, value_name = "K", default_value_t = 8)]
    max_wavelengths: u32,
    /// Longest route considered, in hops. Required above 12 nodes.
    #[arg(long, value_name = "H")]
    hop_limit: Option<usize>,
    /// Worker threads for the search.
    #[arg(long, value_name = "N", default_value_t = 1)]
    jobs: usize,
    /// Return the sequential search's design whatever the thread count.
    #[arg(long)]
    deterministic: bool,
    /// Reserved; the exact search does not use randomness.
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write to PATH instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: Instance,
    #[arg(long, value_enum, default_value = "aggregation")]
    mode: ModeArg,
    #[command(flatten)]
    search: SearchArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long, value_name = "PATH")]
    topology: PathBuf,
    /// Destination node; repeat for several rows.
    #[arg(long = "dest", value_name = "NODE", required = true, num_args = 1..)]
    destinations: Vec<u32>,
    #[command(flatten)]
    search: SearchArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    instance: Instance,
    #[arg(long, value_enum, default_value = "aggregation")]
    mode: ModeArg,
    /// Wavelength columns in the model.
    #[arg(long, value_name = "K", default_value_t = 8)]
    max_wavelengths: u32,
    /// LP file to write; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    instance: Instance,
    /// A `rwaa-solution/1` record, or `name value` lines from an LP solver.
    #[arg(long, value_name = "PATH")]
    solution: PathBuf,
    /// Model the assignment was solved against (assignment files only).
    #[arg(long, value_enum, default_value = "aggregation")]
    mode: ModeArg,
    /// Wavelength columns of that model (assignment files only).
    #[arg(long, value_name = "K", default_value_t = 8)]
    max_wavelengths: u32,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { exit::OK });
        }
    };
    let result = match cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Compare(a) => commands::compare(a),
        Command::ExportLp(a) => commands::export_lp(a),
        Command::Verify(a) => commands::verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, message }) => {
            eprintln!("rwaa: {message}");
            ExitCode::from(code)
        }
    }
}
