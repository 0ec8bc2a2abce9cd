#![no_main]

use concise::QueryStructure;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(qs) = QueryStructure::deserialize(data) {
        // Accepted input is canonical.
        assert_eq!(qs.serialize(), data);
        let _ = qs.query(data);
    }
});
