use std::io;
use std::process::ExitCode;

use clap::Parser;
use weil_cli::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match weil_cli::run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("weil: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
