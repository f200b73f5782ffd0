//! Full-scale acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.
//!
//! `ACCEPTANCE_SCALE=quick` runs reduced sample counts; `ACCEPTANCE_SEED`
//! overrides the default seed.

use std::process::ExitCode;

use haarlab::verify::{verify_all_with, Scale};

fn main() -> ExitCode {
    let scale = std::env::var("ACCEPTANCE_SCALE")
        .ok()
        .map(|s| s.parse::<Scale>().expect("ACCEPTANCE_SCALE must be quick or full"))
        .unwrap_or(Scale::Full);
    let seed = std::env::var("ACCEPTANCE_SEED")
        .ok()
        .map(|s| s.parse::<u64>().expect("ACCEPTANCE_SEED must be an integer"))
        .unwrap_or(20_240_601);
    println!("acceptance suite: seed {seed}, scale {scale:?}");
    let report = verify_all_with(seed, scale, |r| {
        println!("{}", r.summary_line());
        if !r.passed {
            println!("    {}", r.details);
        }
    });
    let failed = report.criteria.iter().filter(|c| !c.passed).count();
    println!("{} of {} criteria passed", report.criteria.len() - failed, report.criteria.len());
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
