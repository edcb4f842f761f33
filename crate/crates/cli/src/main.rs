use std::io;
use std::process::ExitCode;

use bootcorr_cli::{run, Cli, Streams};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = io::stdout().lock();
    let mut stderr = io::stderr();
    let result = run(
        cli,
        Streams {
            stdout: &mut stdout,
            stderr: &mut stderr,
        },
    );
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
