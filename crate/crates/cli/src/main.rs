//! `sis`: command-line front end for the coherent-state library.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 numerical
//! non-convergence, 3 verification failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;
use sis_core::Error;

use crate::args::{Cli, Resolved};
use crate::commands::Outcome;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NoConvergence(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SIS_LOG", "warn")).format_timestamp(None).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = Resolved::new(&cli.common).and_then(|r| commands::run(&cli.command, &r));
    match result {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed(why)) => {
            eprintln!("verification failed:\n{why}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
