//! `adalloc` — seed-allocation solvers for social advertising campaigns.
//!
//! Subcommands: gen, solve, eval, oracle, certify, bench. Every command is
//! a pure function of its files, flags, and seed; primary output is JSON on
//! stdout (or `--out`), errors are a JSON object with a kind tag. Exit
//! codes: 0 ok, 1 input error, 2 solver abort.

mod commands;
mod error;
mod instance;
mod output;

use clap::Parser;
use error::CliError;

#[derive(Parser)]
#[command(
    name = "adalloc",
    version,
    about = "Seed-allocation solvers for social advertising"
)]
struct Cli {
    #[command(subcommand)]
    command: commands::Command,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp
                    | ErrorKind::DisplayVersion
                    | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            ) {
                print!("{}", err);
                std::process::exit(0);
            }
            let err = CliError::usage(err.to_string());
            println!("{}", err.to_json());
            std::process::exit(err.code);
        }
    };
    if let Err(err) = commands::run(cli.command) {
        println!("{}", err.to_json());
        std::process::exit(err.code);
    }
}
