//! `twocenter`: batch front end for the two-center Coulomb library.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{OptimizeArgs, OracleArgs, Outcome, PtArgs, ReproduceArgs, TransitionsArgs, UnitedAtomArgs};

#[derive(Debug, Parser)]
#[command(name = "twocenter", version, about = "Low-lying states of the one-electron two-center Coulomb problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Variationally optimize a state at one or more distances.
    Optimize(OptimizeArgs),
    /// Solve the separated equations directly for reference energies and separation constants.
    Oracle(OracleArgs),
    /// First-order perturbative diagnostics of an optimized state.
    Pt(PtArgs),
    /// Oscillator strengths from the ground state.
    Transitions(TransitionsArgs),
    /// Small-distance limit of a state.
    UnitedAtom(UnitedAtomArgs),
    /// Regenerate the bundled reference tables and report the differences.
    ReproduceTables(ReproduceArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Optimize(a) => commands::optimize(a),
        Command::Oracle(a) => commands::oracle(a),
        Command::Pt(a) => commands::pt(a),
        Command::Transitions(a) => commands::transitions(a),
        Command::UnitedAtom(a) => commands::united_atom(a),
        Command::ReproduceTables(a) => commands::reproduce_tables(a),
    };
    match result {
        Ok(Outcome::Complete) => ExitCode::SUCCESS,
        Ok(Outcome::Unconverged(what)) => {
            eprintln!("warning: {what}");
            ExitCode::from(3)
        }
        Ok(Outcome::Failed(e)) | Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
