//! Regenerates the checked-in fuzz corpus seeds.
//!
//! ```text
//! cargo run -p concise --example fuzz_seeds -- fuzz/corpus
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use concise::{
    CellChange, Config, ControlStructure, Name, QueryStructure, Side, SizeOption, UpdateMessage,
};

fn write(dir: &Path, target: &str, file: &str, bytes: &[u8]) -> std::io::Result<()> {
    let dir = dir.join(target);
    fs::create_dir_all(&dir)?;
    fs::write(dir.join(file), bytes)
}

fn structure(n: u64, width: u32, option: SizeOption) -> ControlStructure {
    let pairs = (0..n).map(|k| (Name::from_u64(k), k % (1 << width.min(8))));
    ControlStructure::construct(pairs, &Config::new(width).option(option).seed(n)).unwrap()
}

fn main() -> std::io::Result<()> {
    let root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("fuzz/corpus"));

    for (n, width, option) in [
        (0, 1, SizeOption::Skewed),
        (5, 3, SizeOption::Square),
        (40, 8, SizeOption::Skewed),
        (12, 13, SizeOption::Skewed),
    ] {
        let qs = QueryStructure::export(&structure(n, width, option), 0).unwrap();
        write(
            &root,
            "query_structure",
            &format!("n{n}_w{width}"),
            &qs.serialize(),
        )?;
    }
    let fib = concise::Fib::build(
        (0..20u64).map(|k| (Name::from_u64(k), k % 16)),
        4,
        concise::ChecksumScheme::default(),
        SizeOption::Skewed,
        3,
    )
    .unwrap();
    write(
        &root,
        "query_structure",
        "fib_l4_r8",
        &fib.export().unwrap().serialize(),
    )?;

    let mut cs = structure(30, 8, SizeOption::Skewed);
    let rec = cs.add(Name::from_u64(1000), 7).unwrap();
    write(
        &root,
        "update_message",
        "delta_add",
        &UpdateMessage::from_mutation(&rec, &cs, 0).unwrap().encode(),
    )?;
    let rec = cs.set_action(&3u64.to_le_bytes(), 200).unwrap();
    write(
        &root,
        "update_message",
        "delta_set",
        &UpdateMessage::from_mutation(&rec, &cs, 0).unwrap().encode(),
    )?;
    write(
        &root,
        "update_message",
        "delta_empty",
        &UpdateMessage::Delta(Vec::new()).encode(),
    )?;
    let small = UpdateMessage::Delta(vec![
        CellChange {
            side: Side::A,
            index: 3,
            value: 0x5a,
        },
        CellChange {
            side: Side::B,
            index: 31,
            value: 0xff,
        },
    ]);
    write(&root, "update_message", "delta_in_range", &small.encode())?;
    let full = UpdateMessage::Full(
        QueryStructure::export(&structure(8, 8, SizeOption::Skewed), 0).unwrap(),
    );
    write(&root, "update_message", "full", &full.encode())?;

    write(
        &root,
        "fib_input",
        "basic",
        b"# name action\n0a0b0c0d0e0f 3\n001122334455 12\n\nffeeddccbbaa 0\n",
    )?;
    write(
        &root,
        "fib_input",
        "tabs",
        b"\tab\t1\ncdef  18446744073709551615\n",
    )?;
    write(&root, "fib_input", "bad_line", b"0a 1\nzz 2\n")?;
    write(&root, "fib_input", "duplicate", b"0a 1\n0A 2\n")?;

    write(&root, "name_hex", "mac", b"0a1b2c3d4e5f")?;
    write(&root, "name_hex", "upper_ws", b"  DEADBEEF\n")?;
    write(&root, "name_hex", "odd", b"abc")?;
    write(&root, "name_hex", "empty", b"")?;
    Ok(())
}
