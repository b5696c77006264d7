//! Runner for the acceptance criteria, shared by the `acceptance` test target.

use hyperlat::verify::{run_all, VerifyOptions};

/// Runs every criterion, printing one line each and a closing tally.
/// Returns whether all of them passed.
pub fn run_and_report(opts: &VerifyOptions) -> hyperlat::Result<bool> {
    println!("acceptance suite, seed {}", opts.seed);
    let outcomes = run_all(opts, |o| println!("{}", o.summary_line()))?;
    let passed = outcomes.iter().filter(|o| o.passed()).count();
    println!("acceptance: {passed}/{} criteria passed", outcomes.len());
    Ok(passed == outcomes.len())
}
