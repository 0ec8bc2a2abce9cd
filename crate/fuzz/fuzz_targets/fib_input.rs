#![no_main]

use concise::input::{format_pairs, parse_pairs};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(pairs) = parse_pairs(text) {
        let again = parse_pairs(&format_pairs(pairs.iter().map(|(n, a)| (n, *a)))).unwrap();
        assert_eq!(again, pairs);
    }
});
