#![no_main]

use concise::{HashPair, QueryStructure, SizePair, UpdateMessage};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(msg) = UpdateMessage::decode(data) else {
        return;
    };
    assert_eq!(msg.encode(), data);
    let sizes = SizePair::new(64, 32).unwrap();
    let mut qs =
        QueryStructure::from_parts(8, 0, sizes, HashPair::new(1, 2), vec![0; 64], vec![0; 32])
            .unwrap();
    let before = qs.clone();
    if qs.apply(&msg).is_err() {
        assert_eq!(qs, before);
    }
});
