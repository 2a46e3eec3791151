//! One line per acceptance criterion. Criteria listed in `KNOWN_LIMITS` are
//! reported but do not fail the target.

use std::process::ExitCode;
use std::time::Instant;

use hardy_core::acceptance::{run_criterion, Preset};

fn main() -> ExitCode {
    let preset = Preset::desk();
    let mut failed = Vec::new();
    for id in 1..=12 {
        let t = Instant::now();
        let r = run_criterion(id, &preset);
        println!("{} ({:.1} s)", r.summary(), t.elapsed().as_secs_f64());
        if !r.passed && r.known_limit.is_none() {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {failed:?}");
        ExitCode::FAILURE
    }
}
