#![no_main]

use bkm_core::problem_file::parse_problem_file;
use libfuzzer_sys::fuzz_target;

// Parsed files are solved as well, with the knot count capped so every run
// stays fast. Solver errors are fine; panics are not.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(mut problem) = parse_problem_file(text) {
        problem.knots = problem.knots.min(40);
        problem.eval.truncate(64);
        let _ = problem.run();
    }
});
