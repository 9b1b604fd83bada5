#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(x) = amdriver::scenario::parse_fraction(text) {
            assert!(x.is_finite());
        }
    }
});
