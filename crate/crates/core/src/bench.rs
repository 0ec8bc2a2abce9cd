//! Throughput drivers for the data plane and the update path.
//!
//! Query traffic comes from per-thread LFSRs. Rates depend on the machine and
//! are reported, never asserted.

use std::sync::atomic::{AtomicBool, Ordering};
use std::thread;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::concurrent::GuardedQueryStructure;
use crate::error::Result;
use crate::fib::Fib;
use crate::lfsr::Lfsr;
use crate::name::Name;
use crate::probe::ReadCounter;
use crate::width_mask;

#[derive(Clone, Debug)]
pub struct QueryBenchConfig {
    pub threads: usize,
    pub duration: Duration,
    pub lfsr_width: u32,
    pub seed: u64,
    /// Leading `(name, action)` results of thread 0 kept for checking.
    pub samples: usize,
}

impl Default for QueryBenchConfig {
    fn default() -> Self {
        QueryBenchConfig {
            threads: 1,
            duration: Duration::from_secs(1),
            lfsr_width: 32,
            seed: 1,
            samples: 1024,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QueryBenchReport {
    pub threads: usize,
    pub queries: u64,
    pub cell_reads: u64,
    pub elapsed: Duration,
    pub samples: Vec<(Name, u64)>,
}

impl QueryBenchReport {
    pub fn queries_per_second(&self) -> f64 {
        self.queries as f64 / self.elapsed.as_secs_f64().max(f64::MIN_POSITIVE)
    }

    pub fn reads_per_query(&self) -> f64 {
        if self.queries == 0 {
            0.0
        } else {
            self.cell_reads as f64 / self.queries as f64
        }
    }
}

/// Seed of the LFSR driving reader `t`. Distinct per thread and never zero.
pub fn thread_lfsr(width: u32, seed: u64, t: usize) -> Result<Lfsr> {
    let mixed = seed.wrapping_add((t as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let state = mixed & width_mask(width);
    Lfsr::new(width, if state == 0 { 1 } else { state })
}

const BATCH: u64 = 4096;

fn reader(
    gqs: &GuardedQueryStructure,
    mut lfsr: Lfsr,
    stop: &AtomicBool,
    keep: usize,
) -> (u64, u64, Vec<(Name, u64)>) {
    let mut probe = ReadCounter::default();
    let mut samples = Vec::with_capacity(keep);
    let mut queries = 0u64;
    let mut sink = 0u64;
    while samples.len() < keep {
        let name = lfsr.next_name();
        let action = gqs.query_probed(name.as_bytes(), &mut probe);
        samples.push((name, action));
        queries += 1;
    }
    while !stop.load(Ordering::Relaxed) {
        for _ in 0..BATCH {
            let state = lfsr.step();
            let (bytes, len) = lfsr.name_bytes(state);
            sink ^= gqs.query_probed(&bytes[..len], &mut probe);
        }
        queries += BATCH;
    }
    std::hint::black_box(sink);
    (queries, probe.reads, samples)
}

/// Runs `threads` readers for `duration`, each walking its own LFSR.
pub fn bench_query_throughput(
    gqs: &GuardedQueryStructure,
    cfg: &QueryBenchConfig,
) -> Result<QueryBenchReport> {
    let threads = cfg.threads.max(1);
    let lfsrs = (0..threads)
        .map(|t| thread_lfsr(cfg.lfsr_width, cfg.seed, t))
        .collect::<Result<Vec<_>>>()?;
    let stop = AtomicBool::new(false);
    let start = Instant::now();
    let results = thread::scope(|s| {
        let handles: Vec<_> = lfsrs
            .into_iter()
            .enumerate()
            .map(|(t, lfsr)| {
                let keep = if t == 0 { cfg.samples } else { 0 };
                let stop = &stop;
                s.spawn(move || reader(gqs, lfsr, stop, keep))
            })
            .collect();
        thread::sleep(cfg.duration);
        stop.store(true, Ordering::Relaxed);
        handles
            .into_iter()
            .map(|h| h.join().expect("reader panicked"))
            .collect::<Vec<_>>()
    });
    let elapsed = start.elapsed();
    let mut report = QueryBenchReport {
        threads,
        queries: 0,
        cell_reads: 0,
        elapsed,
        samples: Vec::new(),
    };
    for (t, (q, r, samples)) in results.into_iter().enumerate() {
        report.queries += q;
        report.cell_reads += r;
        if t == 0 {
            report.samples = samples;
        }
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct UpdateBenchConfig {
    /// Pacing target; `None` runs flat out.
    pub updates_per_sec: Option<f64>,
    pub duration: Duration,
    pub reader_threads: usize,
    pub lfsr_width: u32,
    pub seed: u64,
}

impl Default for UpdateBenchConfig {
    fn default() -> Self {
        UpdateBenchConfig {
            updates_per_sec: None,
            duration: Duration::from_secs(1),
            reader_threads: 0,
            lfsr_width: 32,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UpdateBenchReport {
    pub mutations: u64,
    pub adds: u64,
    pub set_actions: u64,
    pub deletes: u64,
    pub rebuilds: u64,
    pub cells_written: u64,
    pub elapsed: Duration,
    /// Queries served by the concurrent readers.
    pub queries: u64,
}

impl UpdateBenchReport {
    pub fn mutations_per_second(&self) -> f64 {
        self.mutations as f64 / self.elapsed.as_secs_f64().max(f64::MIN_POSITIVE)
    }

    pub fn queries_per_second(&self) -> f64 {
        self.queries as f64 / self.elapsed.as_secs_f64().max(f64::MIN_POSITIVE)
    }
}

/// Applies random mutations (equal parts add, set_action, delete) to `fib`
/// and forwards each one to `gqs`, optionally with LFSR readers running.
///
/// Added names are 9 bytes long so they never collide with 8-byte names.
/// Their counter starts at a random offset drawn from the seed.
pub fn bench_updates(
    fib: &mut Fib,
    gqs: &GuardedQueryStructure,
    cfg: &UpdateBenchConfig,
) -> Result<UpdateBenchReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut live: Vec<Name> = fib.control().entries().map(|(n, _)| n.clone()).collect();
    let action_mask = width_mask(fib.action_width());
    let mut fresh: u64 = rng.random();
    let mut report = UpdateBenchReport {
        mutations: 0,
        adds: 0,
        set_actions: 0,
        deletes: 0,
        rebuilds: 0,
        cells_written: 0,
        elapsed: Duration::ZERO,
        queries: 0,
    };
    let lfsrs = (0..cfg.reader_threads)
        .map(|t| thread_lfsr(cfg.lfsr_width, cfg.seed ^ 0x5eed, t))
        .collect::<Result<Vec<_>>>()?;
    let stop = AtomicBool::new(false);
    let start = Instant::now();
    let outcome = thread::scope(|s| -> Result<u64> {
        let readers: Vec<_> = lfsrs
            .into_iter()
            .map(|lfsr| {
                let stop = &stop;
                s.spawn(move || reader(gqs, lfsr, stop, 0).0)
            })
            .collect();
        let result = (|| -> Result<()> {
            while start.elapsed() < cfg.duration {
                if let Some(rate) = cfg.updates_per_sec {
                    let due = Duration::from_secs_f64(report.mutations as f64 / rate);
                    if let Some(wait) = due.checked_sub(start.elapsed()) {
                        thread::sleep(wait);
                    }
                }
                let op = if live.is_empty() {
                    0
                } else {
                    rng.random_range(0..3)
                };
                let rec = match op {
                    0 => {
                        let mut bytes = fresh.to_le_bytes().to_vec();
                        bytes.push(0xa5);
                        fresh += 1;
                        let name = Name::new(bytes)?;
                        live.push(name.clone());
                        report.adds += 1;
                        fib.add(name, rng.random::<u64>() & action_mask)?
                    }
                    1 => {
                        let name = &live[rng.random_range(0..live.len())];
                        report.set_actions += 1;
                        fib.set_action(name.as_bytes(), rng.random::<u64>() & action_mask)?
                    }
                    _ => {
                        let name = live.swap_remove(rng.random_range(0..live.len()));
                        report.deletes += 1;
                        fib.delete(name.as_bytes())?
                    }
                };
                if rec.new_structure_needed() {
                    report.rebuilds += 1;
                }
                report.cells_written += rec.changed_cells.len() as u64;
                gqs.apply(&fib.update_message(&rec)?)?;
                report.mutations += 1;
            }
            Ok(())
        })();
        stop.store(true, Ordering::Relaxed);
        let queries = readers
            .into_iter()
            .map(|h| h.join().expect("reader panicked"))
            .sum();
        result.map(|()| queries)
    });
    report.queries = outcome?;
    report.elapsed = start.elapsed();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fib::ChecksumScheme;
    use crate::lfsr::lfsr_stream;
    use crate::sizes::SizeOption;
    use std::collections::HashMap;

    fn lfsr_fib(width: u32, seed: u64, n: usize) -> (Fib, HashMap<Name, u64>) {
        let names = lfsr_stream(&mut thread_lfsr(width, seed, 0).unwrap(), n);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let oracle: HashMap<Name, u64> = names
            .into_iter()
            .map(|n| (n, rng.random_range(0..256)))
            .collect();
        let fib = Fib::build(
            oracle.clone(),
            8,
            ChecksumScheme::default(),
            SizeOption::Skewed,
            1,
        )
        .unwrap();
        (fib, oracle)
    }

    #[test]
    fn query_bench_reads_two_cells_and_matches_oracle() {
        let (fib, oracle) = lfsr_fib(16, 9, 65_535);
        let gqs = GuardedQueryStructure::new(fib.export().unwrap());
        let cfg = QueryBenchConfig {
            threads: 2,
            duration: Duration::from_millis(300),
            lfsr_width: 16,
            seed: 9,
            samples: 2000,
        };
        let r = bench_query_throughput(&gqs, &cfg).unwrap();
        assert!(r.queries > 0 && r.queries_per_second() > 0.0);
        assert_eq!(r.cell_reads, 2 * r.queries);
        assert_eq!(r.samples.len(), 2000);
        for (name, action) in &r.samples {
            assert_eq!(oracle[name], *action);
        }
    }

    #[test]
    fn query_samples_are_deterministic() {
        let (fib, _) = lfsr_fib(20, 4, 5000);
        let gqs = GuardedQueryStructure::new(fib.export().unwrap());
        let cfg = QueryBenchConfig {
            duration: Duration::from_millis(50),
            lfsr_width: 20,
            seed: 4,
            ..Default::default()
        };
        let a = bench_query_throughput(&gqs, &cfg).unwrap();
        let b = bench_query_throughput(&gqs, &cfg).unwrap();
        assert_eq!(a.samples, b.samples);
    }

    #[test]
    fn update_bench_keeps_planes_in_sync() {
        let (mut fib, _) = lfsr_fib(24, 5, 20_000);
        let gqs = GuardedQueryStructure::new(fib.export().unwrap());
        let cfg = UpdateBenchConfig {
            duration: Duration::from_millis(300),
            reader_threads: 2,
            lfsr_width: 24,
            ..Default::default()
        };
        let r = bench_updates(&mut fib, &gqs, &cfg).unwrap();
        assert!(r.mutations > 0);
        assert_eq!(r.mutations, r.adds + r.set_actions + r.deletes);
        assert_eq!(gqs.to_query_structure(), fib.export().unwrap());
        fib.control().audit().unwrap();
    }

    #[test]
    fn update_bench_respects_pacing() {
        let (mut fib, _) = lfsr_fib(24, 6, 1000);
        let gqs = GuardedQueryStructure::new(fib.export().unwrap());
        let cfg = UpdateBenchConfig {
            updates_per_sec: Some(200.0),
            duration: Duration::from_millis(250),
            ..Default::default()
        };
        let r = bench_updates(&mut fib, &gqs, &cfg).unwrap();
        assert!(r.mutations <= 60, "{r:?}");
    }
}
