use std::process::ExitCode;

use clap::Parser;
use matchpyramid::cli::{run, Cli};

fn main() -> ExitCode {
    // Argument errors exit with status 2 from inside clap.
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
