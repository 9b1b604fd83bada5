#![no_main]

use amdriver::scenario::{emit_scenario, parse_scenario};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(scenario) = parse_scenario(text) else { return };
    let emitted = emit_scenario(&scenario);
    let reparsed = parse_scenario(&emitted).expect("emitted scenario parses");
    assert_eq!(reparsed, scenario);
});
