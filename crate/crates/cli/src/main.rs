use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    windward_cli::main_with(windward_cli::Cli::parse())
}
