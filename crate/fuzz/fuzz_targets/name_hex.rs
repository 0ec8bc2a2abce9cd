#![no_main]

use concise::Name;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(name) = Name::from_hex(text) {
        assert_eq!(Name::from_hex(&name.to_hex()).unwrap(), name);
    }
});
