use std::collections::HashMap;

use concise::fib::{lookup_in, ChecksumScheme};
use concise::{Config, ControlStructure, Fib, Name, QueryStructure, SizeOption, UpdateMessage};
use proptest::prelude::*;

#[derive(Clone, Debug)]
enum Op {
    Add(u16, u64),
    Set(u16, u64),
    Delete(u16),
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        (any::<u16>(), any::<u64>()).prop_map(|(k, v)| Op::Add(k, v)),
        (any::<u16>(), any::<u64>()).prop_map(|(k, v)| Op::Set(k, v)),
        any::<u16>().prop_map(Op::Delete),
    ]
}

fn name(k: u16) -> Name {
    Name::new(format!("key-{k}").into_bytes()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Control plane, switch copy fed by encoded messages, and a map all agree
    /// after every step.
    #[test]
    fn mutations_track_a_map(
        width in 1u32..=16,
        initial in proptest::collection::hash_map(0u16..600, any::<u64>(), 0..200),
        ops in proptest::collection::vec(op(), 1..200),
        seed in any::<u64>(),
        square in any::<bool>(),
    ) {
        let mask = (1u64 << width) - 1;
        let option = if square { SizeOption::Square } else { SizeOption::Skewed };
        let mut oracle: HashMap<Name, u64> =
            initial.into_iter().map(|(k, v)| (name(k), v & mask)).collect();
        let config = Config::new(width).option(option).seed(seed);
        let mut cs = ControlStructure::construct(oracle.clone(), &config).unwrap();
        let mut switch = QueryStructure::export(&cs, 0).unwrap();

        for op in ops {
            let rec = match op {
                Op::Add(k, v) => {
                    let (n, v) = (name(k % 800), v & mask);
                    let r = cs.add(n.clone(), v);
                    if oracle.contains_key(&n) {
                        prop_assert!(r.is_err());
                        continue;
                    }
                    oracle.insert(n, v);
                    r.unwrap()
                }
                Op::Set(k, v) => {
                    let (n, v) = (name(k % 800), v & mask);
                    let r = cs.set_action(n.as_bytes(), v);
                    match oracle.get_mut(&n) {
                        None => { prop_assert!(r.is_err()); continue; }
                        Some(slot) => { *slot = v; r.unwrap() }
                    }
                }
                Op::Delete(k) => {
                    let n = name(k % 800);
                    let r = cs.delete(n.as_bytes());
                    if oracle.remove(&n).is_none() {
                        prop_assert!(r.is_err());
                        continue;
                    }
                    r.unwrap()
                }
            };
            let msg = UpdateMessage::from_mutation(&rec, &cs, 0).unwrap();
            switch.apply(&UpdateMessage::decode(&msg.encode()).unwrap()).unwrap();
            prop_assert_eq!(cs.len(), oracle.len());
        }
        cs.audit().map_err(TestCaseError::fail)?;
        prop_assert_eq!(&switch, &QueryStructure::export(&cs, 0).unwrap());
        for (n, v) in &oracle {
            prop_assert_eq!(cs.query(n.as_bytes()), *v);
            prop_assert_eq!(switch.query(n.as_bytes()), *v);
        }
    }

    #[test]
    fn fib_checksums_survive_mutations(
        initial in proptest::collection::hash_map(any::<u32>(), 0u64..16, 1..300),
        ops in proptest::collection::vec(op(), 1..100),
        seed in any::<u64>(),
    ) {
        let scheme = ChecksumScheme::new(8, 0xabc).unwrap();
        let key = |k: u32| Name::from_u64(u64::from(k));
        let mut oracle: HashMap<Name, u64> = initial.into_iter().map(|(k, v)| (key(k), v)).collect();
        let mut fib = Fib::build(oracle.clone(), 4, scheme, SizeOption::Skewed, seed).unwrap();
        let mut switch = fib.export().unwrap();
        for op in ops {
            let rec = match op {
                Op::Add(k, v) if !oracle.contains_key(&key(u32::from(k))) => {
                    oracle.insert(key(u32::from(k)), v & 15);
                    fib.add(key(u32::from(k)), v & 15).unwrap()
                }
                Op::Set(_, v) | Op::Add(_, v) => {
                    let Some(n) = oracle.keys().next().cloned() else { continue };
                    oracle.insert(n.clone(), v & 15);
                    fib.set_action(n.as_bytes(), v & 15).unwrap()
                }
                Op::Delete(_) => {
                    let Some(n) = oracle.keys().next().cloned() else { continue };
                    oracle.remove(&n);
                    fib.delete(n.as_bytes()).unwrap()
                }
            };
            switch.apply(&fib.update_message(&rec).unwrap()).unwrap();
        }
        for (n, v) in &oracle {
            let hit = lookup_in(&switch, &scheme, n.as_bytes());
            prop_assert!(!hit.alien);
            prop_assert_eq!(hit.action, *v);
            prop_assert_eq!(fib.action_of(n.as_bytes()), Some(*v));
        }
    }
}
