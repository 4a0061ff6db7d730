//! One line per acceptance criterion; exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use robloc_validation::{run_all, Outcome};

fn main() -> ExitCode {
    let t0 = Instant::now();
    let mut failed = 0;
    let outcomes: Vec<Outcome> = run_all(|o| {
        println!("{o}");
        if !o.pass {
            failed += 1;
        }
    });
    println!(
        "acceptance: {}/{} criteria pass ({:.1} s)",
        outcomes.len() - failed,
        outcomes.len(),
        t0.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
