#![no_main]

use bkm_core::problem_file::parse_problem_file;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_problem_file(text);
    }
});
