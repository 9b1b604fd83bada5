#![no_main]

use amdriver::quantum::format_bits;
use amdriver::{build_state, first_zero_distribution, BasisTerm};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|input: (u8, bool, Vec<(u16, f64, f64)>)| {
    let (width, normalize, raw) = input;
    let m = (width % 8) as usize + 1;
    let terms: Vec<BasisTerm> = raw
        .into_iter()
        .take(64)
        .map(|(bits, re, im)| BasisTerm::new(format_bits(bits as usize % (1 << m), m), re, im))
        .collect();
    if let Ok(state) = build_state(&terms, normalize) {
        let d = first_zero_distribution(&state).expect("valid state has a distribution");
        assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
});
