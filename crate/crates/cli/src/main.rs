//! `concise`: build, query and benchmark Othello FIBs, and rerun the
//! random-graph experiments.
//!
//! Reports are `key=value` lines on stdout. Exit codes: 0 success, 1 a
//! tolerance or target was missed, 2 bad usage or unreadable input.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use concise::bench::{bench_query_throughput, bench_updates, QueryBenchConfig, UpdateBenchConfig};
use concise::experiment::{
    run_acyclicity_experiment, run_susceptibility_experiment, ExperimentReport, Tolerance,
};
use concise::fib::{lookup_in, ChecksumScheme, DEFAULT_CHECKSUM_SEED};
use concise::input::parse_pairs;
use concise::lfsr::Lfsr;
use concise::{Fib, GuardedQueryStructure, Name, QueryStructure, SizeOption};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "concise", version, about = "Othello-based FIB tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a query structure from a `<hex-name> <action>` file.
    Build(BuildArgs),
    /// Look up one name in a serialized structure.
    Query(QueryArgs),
    /// Measure query throughput with LFSR-generated names.
    Bench(BenchArgs),
    /// Measure the update path, optionally paced and with concurrent readers.
    BenchUpdate(BenchUpdateArgs),
    /// Rerun a random-graph experiment and compare with its prediction.
    Experiment(ExperimentArgs),
    /// Print LFSR names as an input file with random actions.
    Gen(GenArgs),
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    input: PathBuf,
    /// Action bits.
    #[arg(long, default_value_t = 8)]
    l: u32,
    /// Checksum bits for alien detection; 0 disables it.
    #[arg(long, default_value_t = 0)]
    r: u32,
    /// 1: m_a = m_b; 2: m_b sized to n.
    #[arg(long, default_value_t = 2)]
    option: u8,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    fib: PathBuf,
    /// Name in hex.
    #[arg(long)]
    name: String,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    fib: PathBuf,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Seconds.
    #[arg(long, default_value_t = 1.0)]
    duration: f64,
    #[arg(long, default_value_t = 32)]
    lfsr_width: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct BenchUpdateArgs {
    /// Pacing target; omit to run flat out.
    #[arg(long)]
    updates_per_sec: Option<f64>,
    /// Pairs file to start from. Without it, `--n` random names are used.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 8)]
    l: u32,
    #[arg(long, default_value_t = 0)]
    r: u32,
    #[arg(long, default_value_t = 1.0)]
    duration: f64,
    /// Concurrent reader threads.
    #[arg(long, default_value_t = 0)]
    readers: usize,
    #[arg(long, default_value_t = 32)]
    lfsr_width: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentKind {
    Acyclic,
    Susceptibility,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(value_enum)]
    kind: ExperimentKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    ma: usize,
    #[arg(long)]
    mb: usize,
    #[arg(long)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Overrides the default tolerance (absolute for acyclic, relative for
    /// susceptibility).
    #[arg(long)]
    tolerance: Option<f64>,
    /// Appends a CSV row, writing the header if the file is new.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 32)]
    width: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    count: usize,
    /// Action bits for the random actions.
    #[arg(long, default_value_t = 8)]
    l: u32,
}

/// Result of a command that ran to completion.
enum Verdict {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> anyhow::Result<Verdict> {
    match command {
        Command::Build(a) => build(a),
        Command::Query(a) => query(a),
        Command::Bench(a) => bench(a),
        Command::BenchUpdate(a) => bench_update(a),
        Command::Experiment(a) => experiment(a),
        Command::Gen(a) => gen(a),
    }
}

fn scheme_for(r: u32) -> anyhow::Result<ChecksumScheme> {
    if r == 0 {
        Ok(ChecksumScheme::disabled())
    } else {
        Ok(ChecksumScheme::new(r, DEFAULT_CHECKSUM_SEED)?)
    }
}

fn read_pairs(path: &Path) -> anyhow::Result<Vec<(Name, u64)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_pairs(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_structure(path: &Path) -> anyhow::Result<QueryStructure> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    QueryStructure::deserialize(&bytes).with_context(|| format!("decoding {}", path.display()))
}

fn seconds(value: f64) -> anyhow::Result<Duration> {
    Duration::try_from_secs_f64(value).with_context(|| format!("invalid duration {value}"))
}

fn emit(lines: &[(&str, String)]) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    for (k, v) in lines {
        writeln!(out, "{k}={v}")?;
    }
    Ok(())
}

fn build(a: BuildArgs) -> anyhow::Result<Verdict> {
    let Some(option) = SizeOption::from_number(a.option) else {
        bail!("--option must be 1 or 2");
    };
    let pairs = read_pairs(&a.input)?;
    let fib = Fib::build(pairs, a.l, scheme_for(a.r)?, option, a.seed)?;
    let qs = fib.export()?;
    let bytes = qs.serialize();
    fs::write(&a.out, &bytes).with_context(|| format!("writing {}", a.out.display()))?;
    let sizes = qs.sizes();
    emit(&[
        ("n", fib.len().to_string()),
        ("l", a.l.to_string()),
        ("r", a.r.to_string()),
        ("m_a", sizes.m_a().to_string()),
        ("m_b", sizes.m_b().to_string()),
        ("rounds", fib.control().construction_rounds().to_string()),
        ("bytes", bytes.len().to_string()),
        ("out", a.out.display().to_string()),
    ])?;
    Ok(Verdict::Pass)
}

fn query(a: QueryArgs) -> anyhow::Result<Verdict> {
    let qs = load_structure(&a.fib)?;
    let name = Name::from_hex(&a.name)?;
    let hit = lookup_in(&qs, &scheme_for(qs.checksum_width())?, name.as_bytes());
    emit(&[
        ("name", name.to_hex()),
        ("action", hit.action.to_string()),
        ("alien", hit.alien.to_string()),
    ])?;
    Ok(Verdict::Pass)
}

fn bench(a: BenchArgs) -> anyhow::Result<Verdict> {
    let gqs = GuardedQueryStructure::new(load_structure(&a.fib)?);
    let cfg = QueryBenchConfig {
        threads: a.threads,
        duration: seconds(a.duration)?,
        lfsr_width: a.lfsr_width,
        seed: a.seed,
        samples: 0,
    };
    let r = bench_query_throughput(&gqs, &cfg)?;
    emit(&[
        ("threads", r.threads.to_string()),
        ("queries", r.queries.to_string()),
        ("seconds", format!("{:.3}", r.elapsed.as_secs_f64())),
        ("qps", format!("{:.0}", r.queries_per_second())),
        ("reads_per_query", format!("{:.3}", r.reads_per_query())),
    ])?;
    Ok(if r.cell_reads == 2 * r.queries {
        Verdict::Pass
    } else {
        Verdict::Fail
    })
}

fn bench_update(a: BenchUpdateArgs) -> anyhow::Result<Verdict> {
    if let Some(rate) = a.updates_per_sec {
        if !(rate.is_finite() && rate > 0.0) {
            bail!("--updates-per-sec must be positive");
        }
    }
    let pairs = match &a.input {
        Some(path) => read_pairs(path)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let mask = if a.l >= 64 { u64::MAX } else { (1 << a.l) - 1 };
            let mut seen = std::collections::HashSet::with_capacity(a.n);
            let mut pairs = Vec::with_capacity(a.n);
            while pairs.len() < a.n {
                let k: u64 = rng.random();
                if seen.insert(k) {
                    pairs.push((Name::from_u64(k), rng.random::<u64>() & mask));
                }
            }
            pairs
        }
    };
    let mut fib = Fib::build(pairs, a.l, scheme_for(a.r)?, SizeOption::Skewed, a.seed)?;
    let gqs = GuardedQueryStructure::new(fib.export()?);
    let cfg = UpdateBenchConfig {
        updates_per_sec: a.updates_per_sec,
        duration: seconds(a.duration)?,
        reader_threads: a.readers,
        lfsr_width: a.lfsr_width,
        seed: a.seed,
    };
    let r = bench_updates(&mut fib, &gqs, &cfg)?;
    let achieved = r.mutations_per_second();
    emit(&[
        ("n", fib.len().to_string()),
        ("mutations", r.mutations.to_string()),
        ("adds", r.adds.to_string()),
        ("set_actions", r.set_actions.to_string()),
        ("deletes", r.deletes.to_string()),
        ("rebuilds", r.rebuilds.to_string()),
        ("cells_written", r.cells_written.to_string()),
        ("seconds", format!("{:.3}", r.elapsed.as_secs_f64())),
        ("updates_per_sec", format!("{achieved:.0}")),
        (
            "target_updates_per_sec",
            a.updates_per_sec.map_or("none".into(), |t| format!("{t}")),
        ),
        ("readers", a.readers.to_string()),
        ("reader_qps", format!("{:.0}", r.queries_per_second())),
    ])?;
    // A paced run fails if it fell more than 10% short of its target.
    let met = a.updates_per_sec.map_or(true, |t| achieved >= 0.9 * t);
    Ok(if met { Verdict::Pass } else { Verdict::Fail })
}

fn experiment(a: ExperimentArgs) -> anyhow::Result<Verdict> {
    let mut report = match a.kind {
        ExperimentKind::Acyclic => run_acyclicity_experiment(a.n, a.ma, a.mb, a.trials, a.seed)?,
        ExperimentKind::Susceptibility => {
            run_susceptibility_experiment(a.n, a.ma, a.mb, a.trials, a.seed)?
        }
    };
    if let Some(t) = a.tolerance {
        report = report.with_tolerance(match a.kind {
            ExperimentKind::Acyclic => Tolerance::Absolute(t),
            ExperimentKind::Susceptibility => Tolerance::Relative(t),
        });
    }
    print!("{}", report.to_key_values());
    if let Some(path) = &a.csv {
        append_csv(path, &report)?;
    }
    Ok(if report.passed {
        Verdict::Pass
    } else {
        Verdict::Fail
    })
}

fn append_csv(path: &Path, report: &ExperimentReport) -> anyhow::Result<()> {
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    if fresh {
        writeln!(file, "{}", ExperimentReport::CSV_HEADER)?;
    }
    writeln!(file, "{}", report.to_csv_row())?;
    Ok(())
}

fn gen(a: GenArgs) -> anyhow::Result<Verdict> {
    if a.l == 0 || a.l > 56 {
        bail!("--l must be in 1..=56");
    }
    let mut lfsr = Lfsr::new(a.width, a.seed)?;
    // Past one period the names repeat.
    if a.width < 64 && a.count as u128 >= 1u128 << a.width {
        bail!("--count must be below 2^width");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut out = io::BufWriter::new(io::stdout().lock());
    for _ in 0..a.count {
        let name = lfsr.next_name();
        writeln!(
            out,
            "{} {}",
            name.to_hex(),
            rng.random_range(0..1u64 << a.l)
        )?;
    }
    out.flush()?;
    Ok(Verdict::Pass)
}
