use std::process::ExitCode;

use clap::Parser;
use lasvm_cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    lasvm_cli::init_logging(cli.verbose, cli.quiet);
    match lasvm_cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
