//! Runs acceptance criteria 1 to 15 at full size and prints one line per
//! criterion. Exits nonzero when any criterion fails.

use std::process::ExitCode;

use hyperlat::verify::VerifyOptions;

fn main() -> ExitCode {
    match hyperlat_suite::run_and_report(&VerifyOptions::default()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("acceptance suite aborted: {e}");
            ExitCode::FAILURE
        }
    }
}
