use std::process::ExitCode;

use clap::Parser;

use featboost::cli::Cli;
use featboost::grid::GridError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if matches!(e.downcast_ref::<GridError>(), Some(GridError::EmptySpec)) {
                return ExitCode::from(2);
            }
            ExitCode::FAILURE
        }
    }
}
