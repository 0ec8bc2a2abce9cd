use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn concise(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_concise"))
        .args(args)
        .output()
        .expect("spawn concise")
}

fn fields(out: &Output) -> HashMap<String, String> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_then_query() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("fib.txt");
    let out = dir.path().join("fib.othl");
    fs::write(
        &input,
        "# mac port\n0a0b0c0d0e0f 3\n001122334455 12\n\nffeeddccbbaa 0\n",
    )
    .unwrap();

    let built = concise(&[
        "build",
        "--input",
        path(&input),
        "--l",
        "4",
        "--r",
        "8",
        "--option",
        "1",
        "--out",
        path(&out),
    ]);
    assert!(
        built.status.success(),
        "{}",
        String::from_utf8_lossy(&built.stderr)
    );
    let f = fields(&built);
    assert_eq!(f["n"], "3");
    assert_eq!(f["m_a"], f["m_b"]);
    assert_eq!(fs::metadata(&out).unwrap().len().to_string(), f["bytes"]);

    let q = concise(&["query", "--fib", path(&out), "--name", "001122334455"]);
    assert!(q.status.success());
    let f = fields(&q);
    assert_eq!(f["action"], "12");
    assert_eq!(f["alien"], "false");

    // Either detected as alien or not, but never an error.
    let q = concise(&["query", "--fib", path(&out), "--name", "deadbeef"]);
    assert!(q.status.success());
    assert!(fields(&q).contains_key("alien"));
}

#[test]
fn gen_output_builds_and_benches() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("gen.txt");
    let out = dir.path().join("gen.othl");
    let g = concise(&[
        "gen", "--width", "16", "--seed", "5", "--count", "2000", "--l", "6",
    ]);
    assert!(g.status.success());
    assert_eq!(String::from_utf8_lossy(&g.stdout).lines().count(), 2000);
    fs::write(&input, &g.stdout).unwrap();

    let b = concise(&[
        "build",
        "--input",
        path(&input),
        "--l",
        "6",
        "--out",
        path(&out),
    ]);
    assert!(b.status.success(), "{}", String::from_utf8_lossy(&b.stderr));

    let first = String::from_utf8_lossy(&g.stdout)
        .lines()
        .next()
        .unwrap()
        .to_string();
    let (name, action) = first.split_once(' ').unwrap();
    let q = concise(&["query", "--fib", path(&out), "--name", name]);
    assert_eq!(fields(&q)["action"], action);

    let bench = concise(&[
        "bench",
        "--fib",
        path(&out),
        "--threads",
        "2",
        "--duration",
        "0.2",
        "--lfsr-width",
        "16",
    ]);
    assert!(bench.status.success());
    let f = fields(&bench);
    assert_eq!(f["reads_per_query"], "2.000");
    assert!(f["queries"].parse::<u64>().unwrap() > 0);
}

#[test]
fn bench_update_reports_rate() {
    let u = concise(&[
        "bench-update",
        "--n",
        "5000",
        "--duration",
        "0.2",
        "--readers",
        "1",
    ]);
    assert!(u.status.success(), "{}", String::from_utf8_lossy(&u.stderr));
    let f = fields(&u);
    assert!(f["mutations"].parse::<u64>().unwrap() > 0);
    assert_eq!(f["target_updates_per_sec"], "none");

    // Unreachable pacing target: exit 1.
    let u = concise(&[
        "bench-update",
        "--n",
        "1000",
        "--duration",
        "0.1",
        "--updates-per-sec",
        "1e12",
    ]);
    assert_eq!(u.status.code(), Some(1));
}

#[test]
fn experiment_exit_codes_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("runs.csv");
    let args = [
        "experiment",
        "acyclic",
        "--n",
        "2000",
        "--ma",
        "4096",
        "--mb",
        "4096",
        "--trials",
        "400",
        "--seed",
        "1",
    ];
    let mut with_csv = args.to_vec();
    with_csv.extend(["--csv", path(&csv)]);
    let ok = concise(&with_csv);
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stdout)
    );
    let f = fields(&ok);
    assert_eq!(f["result"], "pass");
    assert_eq!(f["experiment"], "acyclic");

    // Same parameters, same output.
    assert_eq!(concise(&args).stdout, ok.stdout);

    let mut strict = args.to_vec();
    strict.extend(["--tolerance", "0", "--csv", path(&csv)]);
    assert_eq!(concise(&strict).status.code(), Some(1));

    let rows = fs::read_to_string(&csv).unwrap();
    let lines: Vec<_> = rows.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("experiment,"));
    assert!(lines[2].ends_with(",false"));

    let s = concise(&[
        "experiment",
        "susceptibility",
        "--n",
        "1024",
        "--ma",
        "2048",
        "--mb",
        "2048",
        "--trials",
        "100",
    ]);
    assert_eq!(s.status.code(), Some(0));
    assert_eq!(fields(&s)["predicted"], "2.000000");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(concise(&[]).status.code(), Some(2));
    assert_eq!(
        concise(&["experiment", "acyclic", "--n", "10"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        concise(&[
            "experiment",
            "acyclic",
            "--n",
            "5000",
            "--ma",
            "4096",
            "--mb",
            "4096",
            "--trials",
            "1"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        concise(&["query", "--fib", "/nonexistent/x.othl", "--name", "00"])
            .status
            .code(),
        Some(2)
    );

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "0a 1\nzz 2\n").unwrap();
    let out = dir.path().join("o.othl");
    let b = concise(&["build", "--input", path(&bad), "--out", path(&out)]);
    assert_eq!(b.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&b.stderr).contains("line 2"));
    let junk = dir.path().join("junk.othl");
    fs::write(&junk, b"OTHLnope").unwrap();
    assert_eq!(
        concise(&["query", "--fib", path(&junk), "--name", "00"])
            .status
            .code(),
        Some(2)
    );
}
