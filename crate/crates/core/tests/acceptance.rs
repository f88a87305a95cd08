//! One line per acceptance criterion; exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use dynex_core::verify::{run_check, VerifyOptions};

fn main() -> ExitCode {
    let opts = VerifyOptions::default();
    let mut failed = 0;
    for k in 1..=8 {
        let start = Instant::now();
        let r = run_check(k, &opts);
        println!("{r} ({:.1}s)", start.elapsed().as_secs_f64());
        if !r.passed() {
            failed += 1;
        }
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
