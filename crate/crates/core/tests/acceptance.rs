//! Runs every reference criterion at full size and prints one line each.
//! Set `MUXKIT_ACCEPTANCE_QUICK=1` for the reduced Monte-Carlo budget.

use muxkit::verify::{run_all, VerifyOptions};

fn main() {
    muxkit::simkit::configure_threads_from_env();
    let quick = std::env::var("MUXKIT_ACCEPTANCE_QUICK").is_ok_and(|v| v == "1");
    let opts = VerifyOptions { quick, ..Default::default() };
    let results = run_all(&opts);
    let mut failed = 0;
    for r in &results {
        println!("{} ({:.2} s)", r.summary_line(), r.elapsed_secs);
        for f in r.failures.iter().skip(1) {
            println!("       {f}");
        }
        failed += usize::from(!r.passed);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
