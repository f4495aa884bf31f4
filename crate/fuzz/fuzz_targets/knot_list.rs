#![no_main]

use bkm_core::problem_file::parse_knot_list;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(counts) = parse_knot_list(text) {
            assert!(!counts.is_empty());
            assert!(counts.windows(2).all(|w| w[0] <= w[1]));
        }
    }
});
