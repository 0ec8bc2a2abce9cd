//! The controller-side Othello: graph, arrays and key set together.

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, EdgeId, Link, Vertex};
use crate::hash::HashPair;
use crate::name::Name;
use crate::probe::{NoProbe, ReadProbe};
use crate::sizes::{derive_sizes, SizeOption, SizePair};
use crate::{width_mask, MAX_CELL_WIDTH};

/// Build parameters for a [`ControlStructure`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    /// Bits per cell, 1..=64.
    pub width: u32,
    pub option: SizeOption,
    /// Seeds the generator that draws hash seed pairs; fixes the whole build.
    pub master_seed: u64,
    /// Consecutive cyclic rounds tolerated before giving up.
    pub attempt_limit: u32,
    /// A seed the hash pair must never use (the FIB's checksum seed).
    pub reserved_seed: Option<u32>,
}

impl Config {
    pub const DEFAULT_ATTEMPT_LIMIT: u32 = 128;

    pub fn new(width: u32) -> Self {
        Config {
            width,
            option: SizeOption::Skewed,
            master_seed: 0,
            attempt_limit: Self::DEFAULT_ATTEMPT_LIMIT,
            reserved_seed: None,
        }
    }

    pub fn option(mut self, option: SizeOption) -> Self {
        self.option = option;
        self
    }

    pub fn seed(mut self, master_seed: u64) -> Self {
        self.master_seed = master_seed;
        self
    }

    pub fn attempt_limit(mut self, limit: u32) -> Self {
        self.attempt_limit = limit;
        self
    }

    pub fn reserved_seed(mut self, seed: u32) -> Self {
        self.reserved_seed = Some(seed);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
}

/// One rewritten array cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CellChange {
    pub side: Side,
    pub index: usize,
    pub value: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MutationKind {
    Added,
    ActionChanged,
    Deleted,
    /// Sizes and seeds were re-drawn; the data plane needs the whole structure.
    Rebuilt,
}

/// What a mutation did to the arrays.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MutationRecord {
    pub kind: MutationKind,
    /// Cells whose value changed, each listed once with its final value.
    /// Empty for `Rebuilt`.
    pub changed_cells: Vec<CellChange>,
}

impl MutationRecord {
    pub fn new_structure_needed(&self) -> bool {
        self.kind == MutationKind::Rebuilt
    }

    fn unchanged(kind: MutationKind) -> Self {
        MutationRecord {
            kind,
            changed_cells: Vec::new(),
        }
    }
}

/// Mutable Othello over `(name, value)` pairs.
///
/// Holds the sizes, hash pair, acyclic graph, both value arrays and the key
/// index. Values are `width`-bit; for a FIB with checksums the value is the
/// checksum shifted above the action.
#[derive(Clone, Debug)]
pub struct ControlStructure {
    width: u32,
    option: SizeOption,
    sizes: SizePair,
    hashes: HashPair,
    graph: BipartiteGraph<u64>,
    a: Vec<u64>,
    b: Vec<u64>,
    index: IndexMap<Name, EdgeId>,
    rng: ChaCha8Rng,
    master_seed: u64,
    attempt_limit: u32,
    reserved_seed: Option<u32>,
    rounds: u32,
}

impl ControlStructure {
    /// Builds a structure answering `value` for each `name`.
    ///
    /// Draws hash seed pairs until the induced graph is acyclic, then assigns
    /// cells tree by tree in DFS order with each root's `A` cell at zero.
    pub fn construct<I>(pairs: I, config: &Config) -> Result<Self>
    where
        I: IntoIterator<Item = (Name, u64)>,
    {
        if config.width == 0 || config.width > MAX_CELL_WIDTH {
            return Err(Error::WidthOverflow {
                action_bits: config.width,
                checksum_bits: 0,
            });
        }
        let mask = width_mask(config.width);
        let pairs = pairs.into_iter();
        let mut entries: Vec<(Name, u64)> = Vec::with_capacity(pairs.size_hint().0);
        let mut seen: IndexMap<Name, ()> = IndexMap::with_capacity(entries.capacity());
        for (name, value) in pairs {
            if value & !mask != 0 {
                return Err(Error::ActionOutOfRange {
                    action: value,
                    width: config.width,
                });
            }
            if seen.insert(name.clone(), ()).is_some() {
                return Err(Error::DuplicateName(name.to_hex()));
            }
            entries.push((name, value));
        }
        drop(seen);

        let mut rng = ChaCha8Rng::seed_from_u64(config.master_seed);
        let built = Built::build(entries, config, &mut rng)?;
        Ok(ControlStructure {
            width: config.width,
            option: config.option,
            sizes: built.sizes,
            hashes: built.hashes,
            graph: built.graph,
            a: built.a,
            b: built.b,
            index: built.index,
            rng,
            master_seed: config.master_seed,
            attempt_limit: config.attempt_limit,
            reserved_seed: config.reserved_seed,
            rounds: built.rounds,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn option(&self) -> SizeOption {
        self.option
    }

    pub fn sizes(&self) -> SizePair {
        self.sizes
    }

    pub fn hashes(&self) -> HashPair {
        self.hashes
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Seed-pair rounds the most recent (re)construction needed.
    pub fn construction_rounds(&self) -> u32 {
        self.rounds
    }

    pub fn array_a(&self) -> &[u64] {
        &self.a
    }

    pub fn array_b(&self) -> &[u64] {
        &self.b
    }

    pub fn graph(&self) -> &BipartiteGraph<u64> {
        &self.graph
    }

    pub fn contains(&self, name: &[u8]) -> bool {
        self.index.contains_key(name)
    }

    /// Stored value of `name`, from the key set (not the arrays).
    pub fn get(&self, name: &[u8]) -> Option<u64> {
        let &e = self.index.get(name)?;
        self.graph.payload(e).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Name, u64)> + '_ {
        self.index
            .iter()
            .map(|(k, &e)| (k, *self.graph.payload(e).expect("indexed edge is live")))
    }

    #[inline]
    pub fn indices(&self, name: &[u8]) -> (usize, usize) {
        self.hashes.indices(name, &self.sizes)
    }

    /// `A[h_a(k)] ^ B[h_b(k)]`. Arbitrary but in range for names never stored.
    #[inline]
    pub fn query(&self, name: &[u8]) -> u64 {
        self.query_probed(name, &mut NoProbe)
    }

    #[inline]
    pub fn query_probed<P: ReadProbe>(&self, name: &[u8], probe: &mut P) -> u64 {
        let (i, j) = self.indices(name);
        probe.cell_read();
        let x = self.a[i];
        probe.cell_read();
        let y = self.b[j];
        x ^ y
    }

    /// Inserts a new name.
    ///
    /// If the new edge joins two components, the smaller one is recolored by
    /// XOR so the new key resolves to `value`; otherwise the edge would close a
    /// cycle and the structure is rebuilt with fresh sizes and seeds.
    pub fn add(&mut self, name: Name, value: u64) -> Result<MutationRecord> {
        self.check_value(value)?;
        if self.index.contains_key(&name) {
            return Err(Error::DuplicateName(name.to_hex()));
        }
        let (i, j) = self.indices(name.as_bytes());
        match self.graph.link(i as u32, j as u32) {
            Link::Connected => {
                let mut entries: Vec<(Name, u64)> =
                    self.entries().map(|(k, v)| (k.clone(), v)).collect();
                entries.push((name, value));
                self.rebuild(entries)?;
                Ok(MutationRecord::unchanged(MutationKind::Rebuilt))
            }
            Link::Separate { recolor } => {
                let delta = self.a[i] ^ self.b[j] ^ value;
                let changed_cells = self.xor_cells(&recolor, delta);
                let e = self.graph.insert(i as u32, j as u32, value);
                self.index.insert(name, e);
                Ok(MutationRecord {
                    kind: MutationKind::Added,
                    changed_cells,
                })
            }
        }
    }

    /// Changes the value of a stored name. The graph is untouched: the part
    /// of the name's component hanging off its `V` endpoint is XORed with
    /// `old ^ new`.
    pub fn set_action(&mut self, name: &[u8], value: u64) -> Result<MutationRecord> {
        self.check_value(value)?;
        let &e = self
            .index
            .get(name)
            .ok_or_else(|| Error::KeyNotFound(hex::encode(name)))?;
        let old = self.graph.payload_mut(e).expect("indexed edge is live");
        let delta = *old ^ value;
        *old = value;
        if delta == 0 {
            return Ok(MutationRecord::unchanged(MutationKind::ActionChanged));
        }
        let (_, j) = self.graph.endpoints(e).expect("indexed edge is live");
        let side = self.graph.component(Vertex::V(j), Some(e));
        let changed_cells = self.xor_cells(&side, delta);
        Ok(MutationRecord {
            kind: MutationKind::ActionChanged,
            changed_cells,
        })
    }

    /// Removes a name. Arrays are left as they are.
    pub fn delete(&mut self, name: &[u8]) -> Result<MutationRecord> {
        let e = self
            .index
            .swap_remove(name)
            .ok_or_else(|| Error::KeyNotFound(hex::encode(name)))?;
        self.graph.remove(e);
        Ok(MutationRecord::unchanged(MutationKind::Deleted))
    }

    /// Checks every structural invariant. Meant for tests and debugging; walks
    /// the whole graph.
    pub fn audit(&self) -> std::result::Result<(), String> {
        if self.graph.edge_count() != self.index.len() {
            return Err(format!(
                "{} edges for {} names",
                self.graph.edge_count(),
                self.index.len()
            ));
        }
        if !self.graph.is_acyclic() {
            return Err("graph has a cycle".into());
        }
        let mask = width_mask(self.width);
        for (name, &e) in &self.index {
            let (u, v) = self
                .graph
                .endpoints(e)
                .ok_or("index points at a dead edge")?;
            let (i, j) = self.indices(name.as_bytes());
            if (u as usize, v as usize) != (i, j) {
                return Err(format!(
                    "edge of {name} is ({u},{v}), hashes give ({i},{j})"
                ));
            }
            let want = *self.graph.payload(e).unwrap();
            let got = self.a[i] ^ self.b[j];
            if got != want {
                return Err(format!("{name}: query {got} != stored {want}"));
            }
        }
        if self.a.iter().chain(&self.b).any(|&c| c & !mask != 0) {
            return Err("cell wider than width".into());
        }
        Ok(())
    }

    fn check_value(&self, value: u64) -> Result<()> {
        if value & !width_mask(self.width) != 0 {
            return Err(Error::ActionOutOfRange {
                action: value,
                width: self.width,
            });
        }
        Ok(())
    }

    fn xor_cells(&mut self, vertices: &[Vertex], delta: u64) -> Vec<CellChange> {
        if delta == 0 {
            return Vec::new();
        }
        vertices
            .iter()
            .map(|&x| match x {
                Vertex::U(i) => {
                    let cell = &mut self.a[i as usize];
                    *cell ^= delta;
                    CellChange {
                        side: Side::A,
                        index: i as usize,
                        value: *cell,
                    }
                }
                Vertex::V(j) => {
                    let cell = &mut self.b[j as usize];
                    *cell ^= delta;
                    CellChange {
                        side: Side::B,
                        index: j as usize,
                        value: *cell,
                    }
                }
            })
            .collect()
    }

    fn rebuild(&mut self, entries: Vec<(Name, u64)>) -> Result<()> {
        let config = Config {
            width: self.width,
            option: self.option,
            master_seed: self.master_seed,
            attempt_limit: self.attempt_limit,
            reserved_seed: self.reserved_seed,
        };
        let built = Built::build(entries, &config, &mut self.rng)?;
        self.sizes = built.sizes;
        self.hashes = built.hashes;
        self.graph = built.graph;
        self.a = built.a;
        self.b = built.b;
        self.index = built.index;
        self.rounds = built.rounds;
        Ok(())
    }
}

struct Built {
    sizes: SizePair,
    hashes: HashPair,
    graph: BipartiteGraph<u64>,
    a: Vec<u64>,
    b: Vec<u64>,
    index: IndexMap<Name, EdgeId>,
    rounds: u32,
}

impl Built {
    /// Entries must be distinct and in range.
    fn build(entries: Vec<(Name, u64)>, config: &Config, rng: &mut ChaCha8Rng) -> Result<Built> {
        let sizes = derive_sizes(entries.len(), config.option);
        let mut ends: Vec<(u32, u32)> = Vec::with_capacity(entries.len());

        for round in 1..=config.attempt_limit {
            let hashes = draw_seed_pair(rng, config.reserved_seed);
            ends.clear();
            ends.extend(entries.iter().map(|(k, _)| {
                let (i, j) = hashes.indices(k.as_bytes(), &sizes);
                (i as u32, j as u32)
            }));
            let mut graph = BipartiteGraph::with_capacity(sizes.m_a(), sizes.m_b(), entries.len());
            for (&(i, j), (_, value)) in ends.iter().zip(&entries) {
                graph.insert(i, j, *value);
            }
            let Some(order) = graph.dfs_forest() else {
                continue;
            };

            let mut a = vec![0u64; sizes.m_a()];
            let mut b = vec![0u64; sizes.m_b()];
            for t in order {
                let value = *graph.payload(t.edge).unwrap();
                let (i, j) = graph.endpoints(t.edge).unwrap();
                match t.child {
                    Vertex::U(_) => a[i as usize] = b[j as usize] ^ value,
                    Vertex::V(_) => b[j as usize] = a[i as usize] ^ value,
                }
            }

            // Edge ids were handed out sequentially, matching entry order.
            let index = entries
                .into_iter()
                .enumerate()
                .map(|(e, (k, _))| (k, e as EdgeId))
                .collect();
            return Ok(Built {
                sizes,
                hashes,
                graph,
                a,
                b,
                index,
                rounds: round,
            });
        }
        Err(Error::ConstructionFailed {
            attempts: config.attempt_limit,
        })
    }
}

pub(crate) fn draw_seed_pair(rng: &mut ChaCha8Rng, reserved: Option<u32>) -> HashPair {
    loop {
        let (sa, sb): (u32, u32) = (rng.random(), rng.random());
        if sa != sb && Some(sa) != reserved && Some(sb) != reserved {
            return HashPair::new(sa, sb);
        }
    }
}
