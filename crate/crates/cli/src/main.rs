//! `hyperlat` command-line front end.
//!
//! Exit status: 0 success, 1 usage error, 2 computation error (overflow,
//! budget, I/O), 3 a verification gate failed.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use hyperlat::Error;

use crate::args::Cli;

const USAGE: u8 = 1;
const COMPUTATION: u8 = 2;
const GATE: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) | Error::EmptyRegion { .. } => USAGE,
        _ => COMPUTATION,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(USAGE),
            };
        }
    };
    if let Some(k) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(k as usize)
            .build_global()
        {
            eprintln!("error: cannot start {k} worker threads: {e}");
            return ExitCode::from(COMPUTATION);
        }
    }
    let result = commands::run(&cli.command, &cli.global).and_then(|o| {
        commands::write(&o.output, &cli.global, cli.global.output.as_deref())
            .map(|()| o.gates_passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(GATE),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
