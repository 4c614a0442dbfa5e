use std::process::ExitCode;

use clap::Parser;
use zonovol_cli::commands::{cmd_bench, cmd_infinite, cmd_verify, cmd_volume, Cli, Command};
use zonovol_cli::CliError;

fn run(cli: &Cli) -> Result<bool, CliError> {
    match &cli.command {
        Command::Volume(a) => cmd_volume(a).map(|_| true),
        Command::Infinite(a) => cmd_infinite(a).map(|_| true),
        Command::Bench(a) => cmd_bench(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
