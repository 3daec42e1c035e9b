//! `combicov`: combinatorial coverage analysis from the command line.

mod commands;
mod error;
mod formats;

use clap::{Parser, Subcommand};

use commands::{CoverageArgs, DeriveArgs, PartitionArgs, ReportArgs, SdccArgs, SelectArgs};

#[derive(Debug, Parser)]
#[command(
    name = "combicov",
    version,
    about = "t-way combinatorial coverage and set-difference coverage"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derive a discrete factor table from raw features
    Derive(DeriveArgs),
    /// t-way combinatorial coverage of one dataset
    Coverage(CoverageArgs),
    /// Set-difference combinatorial coverage of a target against a source
    Sdcc(SdccArgs),
    /// Split a target into covered and not-covered records
    Partition(PartitionArgs),
    /// Pick a labeling batch mixing random and not-covered records
    Select(SelectArgs),
    /// Coverage gap diagnostics in both directions
    Report(ReportArgs),
}

fn main() {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Derive(args) => commands::derive(args),
        Command::Coverage(args) => commands::coverage(args),
        Command::Sdcc(args) => commands::sdcc_cmd(args),
        Command::Partition(args) => commands::partition(args),
        Command::Select(args) => commands::select(args),
        Command::Report(args) => commands::report(args),
    };
    if let Err(err) = outcome {
        eprintln!("error[{}]: {err}", err.category());
        std::process::exit(err.exit_code());
    }
}
