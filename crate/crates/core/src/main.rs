use std::process::ExitCode;

use clap::Parser;
use maxwell_mixed::cli::{execute, Layer, RunConfig};

fn main() -> ExitCode {
    let flags = Layer::parse();
    let result = RunConfig::resolve(flags).and_then(|config| {
        let csv = execute(&config)?;
        if config.out.is_none() {
            print!("{csv}");
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
