//! The fuzz-target properties, replayed on stable over the checked-in corpus
//! and random mutations of it.

use std::fs;
use std::path::PathBuf;

use concise::input::{format_pairs, parse_pairs};
use concise::{HashPair, Name, QueryStructure, SizePair, UpdateMessage};
use proptest::prelude::*;

fn corpus(target: &str) -> Vec<Vec<u8>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<Vec<u8>> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| fs::read(e.unwrap().path()).unwrap())
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

fn check_query_structure(data: &[u8]) {
    if let Ok(qs) = QueryStructure::deserialize(data) {
        assert_eq!(qs.serialize(), data);
        let _ = qs.query(data);
    }
}

fn check_update_message(data: &[u8]) {
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
}

fn check_fib_input(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(pairs) = parse_pairs(text) {
        let again = parse_pairs(&format_pairs(pairs.iter().map(|(n, a)| (n, *a)))).unwrap();
        assert_eq!(again, pairs);
    }
}

fn check_name_hex(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(name) = Name::from_hex(text) {
        assert_eq!(Name::from_hex(&name.to_hex()).unwrap(), name);
    }
}

#[test]
fn corpus_seeds_decode() {
    for seed in corpus("query_structure") {
        QueryStructure::deserialize(&seed).unwrap();
        check_query_structure(&seed);
    }
    for seed in corpus("update_message") {
        UpdateMessage::decode(&seed).unwrap();
        check_update_message(&seed);
    }
    for seed in corpus("fib_input") {
        check_fib_input(&seed);
    }
    for seed in corpus("name_hex") {
        check_name_hex(&seed);
    }
}

#[test]
fn truncated_or_extended_inputs_are_rejected() {
    for seed in corpus("query_structure") {
        for cut in 0..seed.len() {
            assert!(QueryStructure::deserialize(&seed[..cut]).is_err());
        }
        let mut longer = seed.clone();
        longer.push(0);
        assert!(QueryStructure::deserialize(&longer).is_err());
    }
    for seed in corpus("update_message") {
        for cut in 0..seed.len() {
            assert!(UpdateMessage::decode(&seed[..cut]).is_err());
        }
        let mut longer = seed.clone();
        longer.push(0);
        assert!(UpdateMessage::decode(&longer).is_err());
    }
}

fn mutated(target: &'static str) -> impl Strategy<Value = Vec<u8>> {
    let seeds = corpus(target);
    (
        0..seeds.len(),
        proptest::collection::vec((any::<prop::sample::Index>(), any::<u8>()), 0..8),
        any::<prop::sample::Index>(),
    )
        .prop_map(move |(i, flips, cut)| {
            let mut data = seeds[i].clone();
            if !data.is_empty() {
                for (at, byte) in flips {
                    let at = at.index(data.len());
                    data[at] ^= byte;
                }
                data.truncate(cut.index(data.len() + 1));
            }
            data
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn mutated_query_structures(data in mutated("query_structure")) {
        check_query_structure(&data);
    }

    #[test]
    fn mutated_update_messages(data in mutated("update_message")) {
        check_update_message(&data);
    }

    #[test]
    fn mutated_fib_input(data in mutated("fib_input")) {
        check_fib_input(&data);
    }

    #[test]
    fn mutated_name_hex(data in mutated("name_hex")) {
        check_name_hex(&data);
    }
}
