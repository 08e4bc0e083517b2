//! Runs the nine built-in acceptance suites, printing one line per criterion.
//! Exits non-zero when any criterion fails.

use std::process::ExitCode;

use pursuit::suite::{run_suite, SUITES};

fn main() -> ExitCode {
    let mut failed = 0;
    for name in SUITES {
        let report = run_suite(name).expect("known suite");
        println!("{} ({:.1}s)", report.headline(), report.elapsed.as_secs_f64());
        if !report.passed {
            failed += 1;
            for line in report.lines.iter().filter(|l| l.starts_with("FAIL")).take(5) {
                println!("    {}", line);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", SUITES.len() - failed, SUITES.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
