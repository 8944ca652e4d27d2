//! `rrg`: random regular graph generation, spectra, Green's functions,
//! local resampling and experiment sweeps.

mod commands;
mod manifest;

use std::process::ExitCode;

use clap::Parser;

use commands::{Cli, UsageError};

/// Exit codes: 0 success, 1 usage, 2 input, 3 numeric failure.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some() {
            return 1;
        }
        if let Some(e) = cause.downcast_ref::<rrg_core::Error>() {
            return if e.is_numeric() { 3 } else { 2 };
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
