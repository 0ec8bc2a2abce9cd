//! Monte Carlo checks of the random-graph predictions.
//!
//! Each instance hashes the names `0..n` (as [`Name::from_u64`] bytes) with a
//! fresh seed pair drawn from a ChaCha8 stream keyed by the experiment seed,
//! so a report is reproducible from its parameters alone.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::control::draw_seed_pair;
use crate::error::{Error, Result};
use crate::hash::HashPair;
use crate::sizes::SizePair;

/// Default absolute tolerance on the acyclic fraction.
pub const ACYCLIC_TOLERANCE: f64 = 0.03;
/// Default relative tolerance on the mean component size.
pub const SUSCEPTIBILITY_TOLERANCE: f64 = 0.10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    Acyclicity,
    Susceptibility,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Acyclicity => "acyclic",
            ExperimentKind::Susceptibility => "susceptibility",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tolerance {
    Absolute(f64),
    Relative(f64),
}

impl Tolerance {
    pub fn accepts(self, observed: f64, predicted: f64) -> bool {
        match self {
            Tolerance::Absolute(t) => (observed - predicted).abs() <= t,
            Tolerance::Relative(t) => (observed - predicted).abs() <= t * predicted.abs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub n: usize,
    pub m_a: usize,
    pub m_b: usize,
    pub trials: usize,
    pub seed: u64,
    /// Hash pairs drawn, including instances rejected as cyclic.
    pub instances: usize,
    pub observed: f64,
    pub predicted: f64,
    pub tolerance: Tolerance,
    pub passed: bool,
}

impl ExperimentReport {
    /// Re-judges the report against another tolerance.
    pub fn with_tolerance(mut self, tolerance: Tolerance) -> Self {
        self.tolerance = tolerance;
        self.passed = tolerance.accepts(self.observed, self.predicted);
        self
    }

    fn tolerance_fields(&self) -> (&'static str, f64) {
        match self.tolerance {
            Tolerance::Absolute(t) => ("absolute", t),
            Tolerance::Relative(t) => ("relative", t),
        }
    }

    /// One `key=value` pair per line.
    pub fn to_key_values(&self) -> String {
        let (mode, tol) = self.tolerance_fields();
        let mut s = String::new();
        let _ = writeln!(s, "experiment={}", self.kind.as_str());
        let _ = writeln!(s, "n={}", self.n);
        let _ = writeln!(s, "m_a={}", self.m_a);
        let _ = writeln!(s, "m_b={}", self.m_b);
        let _ = writeln!(s, "trials={}", self.trials);
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "instances={}", self.instances);
        let _ = writeln!(s, "observed={:.6}", self.observed);
        let _ = writeln!(s, "predicted={:.6}", self.predicted);
        let _ = writeln!(s, "tolerance_mode={mode}");
        let _ = writeln!(s, "tolerance={tol}");
        let _ = writeln!(s, "result={}", if self.passed { "pass" } else { "fail" });
        s
    }

    pub const CSV_HEADER: &'static str =
        "experiment,n,m_a,m_b,trials,seed,instances,observed,predicted,tolerance_mode,tolerance,passed";

    pub fn to_csv_row(&self) -> String {
        let (mode, tol) = self.tolerance_fields();
        format!(
            "{},{},{},{},{},{},{},{:.6},{:.6},{},{},{}",
            self.kind.as_str(),
            self.n,
            self.m_a,
            self.m_b,
            self.trials,
            self.seed,
            self.instances,
            self.observed,
            self.predicted,
            mode,
            tol,
            self.passed
        )
    }
}

/// Union-find over `U ++ V`, with U vertex `i` at `i` and V vertex `j` at
/// `m_a + j`.
struct Components {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl Components {
    fn new(vertices: usize) -> Self {
        Components {
            parent: (0..vertices as u32).collect(),
            size: vec![1; vertices],
        }
    }

    fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i as u32;
        }
        self.size.fill(1);
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let up = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = up;
            x = up;
        }
        x
    }

    /// False if `x` and `y` were already connected.
    fn union(&mut self, x: u32, y: u32) -> bool {
        let (mut rx, mut ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        if self.size[rx as usize] < self.size[ry as usize] {
            std::mem::swap(&mut rx, &mut ry);
        }
        self.parent[ry as usize] = rx;
        self.size[rx as usize] += self.size[ry as usize];
        true
    }

    /// `sum |cc|^2 / vertices`: the expected component size of a uniformly
    /// chosen vertex, computed exactly.
    fn susceptibility(&mut self) -> f64 {
        let mut sum = 0u128;
        for v in 0..self.parent.len() as u32 {
            if self.find(v) == v {
                sum += u128::from(self.size[v as usize]).pow(2);
            }
        }
        sum as f64 / self.parent.len() as f64
    }
}

struct Instances {
    sizes: SizePair,
    keys: Vec<[u8; 8]>,
    rng: ChaCha8Rng,
    comps: Components,
}

impl Instances {
    fn new(n: usize, m_a: usize, m_b: usize, seed: u64) -> Result<Self> {
        let sizes = SizePair::new(m_a, m_b)?;
        Ok(Instances {
            sizes,
            keys: (0..n as u64).map(u64::to_le_bytes).collect(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            comps: Components::new(m_a + m_b),
        })
    }

    /// Draws a fresh hash pair and loads its graph; true if acyclic.
    fn next(&mut self) -> bool {
        let hashes: HashPair = draw_seed_pair(&mut self.rng, None);
        self.comps.reset();
        let m_a = self.sizes.m_a() as u32;
        let mut acyclic = true;
        for key in &self.keys {
            let (i, j) = hashes.indices(key, &self.sizes);
            if !self.comps.union(i as u32, m_a + j as u32) {
                acyclic = false;
                break;
            }
        }
        acyclic
    }
}

/// Fraction of `trials` random hash pairs whose graph is acyclic, against
/// `sqrt(1 - c^2)`.
pub fn run_acyclicity_experiment(
    n: usize,
    m_a: usize,
    m_b: usize,
    trials: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    let mut inst = Instances::new(n, m_a, m_b, seed)?;
    let c = inst.sizes.cycle_load(n);
    if c >= 1.0 {
        return Err(Error::InvalidLoad { load: c });
    }
    let acyclic = (0..trials).filter(|_| inst.next()).count();
    let observed = if trials == 0 {
        0.0
    } else {
        acyclic as f64 / trials as f64
    };
    let predicted = (1.0 - c * c).sqrt();
    let tolerance = Tolerance::Absolute(ACYCLIC_TOLERANCE);
    Ok(ExperimentReport {
        kind: ExperimentKind::Acyclicity,
        n,
        m_a,
        m_b,
        trials,
        seed,
        instances: trials,
        observed,
        predicted,
        tolerance,
        passed: trials > 0 && tolerance.accepts(observed, predicted),
    })
}

/// Mean component size of a random vertex over `trials` acyclic instances,
/// against `1 / (1 - p)`. Cyclic draws are rejected and redrawn.
pub fn run_susceptibility_experiment(
    n: usize,
    m_a: usize,
    m_b: usize,
    trials: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    let mut inst = Instances::new(n, m_a, m_b, seed)?;
    let p = inst.sizes.edge_density(n);
    if p >= 1.0 {
        return Err(Error::InvalidLoad { load: p });
    }
    let mut drawn = 0usize;
    let mut total = 0.0;
    for _ in 0..trials {
        loop {
            drawn += 1;
            if inst.next() {
                break;
            }
        }
        total += inst.comps.susceptibility();
    }
    let observed = if trials == 0 {
        0.0
    } else {
        total / trials as f64
    };
    let predicted = 1.0 / (1.0 - p);
    let tolerance = Tolerance::Relative(SUSCEPTIBILITY_TOLERANCE);
    Ok(ExperimentReport {
        kind: ExperimentKind::Susceptibility,
        n,
        m_a,
        m_b,
        trials,
        seed,
        instances: drawn,
        observed,
        predicted,
        tolerance,
        passed: trials > 0 && tolerance.accepts(observed, predicted),
    })
}
