use std::process::ExitCode;

use clap::Parser;
use saguaro_kit::{emit, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| emit(&cli, &out).map(|_| out.code));
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("saguaro-kit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
