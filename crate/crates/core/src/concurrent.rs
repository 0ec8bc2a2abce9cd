//! Lock-free reads against a query structure that one updater rewrites in
//! place.
//!
//! Two guard vectors `D1` and `D2` of [`GUARD_SLOTS`] positions cover the `A`
//! array, position `p(i) = i mod 512`. An update flips `D1[p]` for every `A`
//! index it touches, writes the cells, then flips the same `D2[p]`. A reader
//! loads `D2[p]`, both cells, then `D1[p]`, and accepts the XOR only if the two
//! guard reads agree. If `A[i]` is unchanged the reader cannot mix versions in
//! a harmful way, since either `B[j]` yields a correct answer, so `B` needs no
//! guard.
//!
//! Each guard position is a counter whose low bit is the flip bit. Readers
//! compare whole counters, so two back-to-back updates on one position can
//! never look quiescent to a reader stalled across both.
//!
//! Ordering: `D1` increments, then a release fence, then relaxed cell stores,
//! then release increments of `D2`. Readers do an acquire load of `D2`, relaxed
//! cell loads, an acquire fence, then load `D1`.

use std::hint;
use std::sync::atomic::{fence, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;

use arc_swap::ArcSwap;

use crate::control::{CellChange, Side};
use crate::error::Result;
use crate::hash::HashPair;
use crate::planes::{validate_cells, QueryStructure, UpdateMessage};
use crate::probe::{NoProbe, ReadProbe};
use crate::sizes::SizePair;
use crate::width_mask;

pub const GUARD_SLOTS: usize = 512;

/// The `D1`/`D2` guard vectors.
pub struct GuardPair {
    d1: Box<[AtomicU64]>,
    d2: Box<[AtomicU64]>,
}

impl GuardPair {
    fn new() -> Self {
        let zeros = || {
            (0..GUARD_SLOTS)
                .map(|_| AtomicU64::new(0))
                .collect::<Box<[_]>>()
        };
        GuardPair {
            d1: zeros(),
            d2: zeros(),
        }
    }

    /// `D1` as a 512-bit vector, bit `p` in word `p / 64`.
    pub fn d1_bits(&self) -> [u64; GUARD_SLOTS / 64] {
        bits(&self.d1)
    }

    pub fn d2_bits(&self) -> [u64; GUARD_SLOTS / 64] {
        bits(&self.d2)
    }

    /// No update in flight on any position.
    pub fn is_quiescent(&self) -> bool {
        self.d1
            .iter()
            .zip(self.d2.iter())
            .all(|(x, y)| x.load(Ordering::Acquire) == y.load(Ordering::Acquire))
    }
}

fn bits(slots: &[AtomicU64]) -> [u64; GUARD_SLOTS / 64] {
    let mut out = [0u64; GUARD_SLOTS / 64];
    for (p, slot) in slots.iter().enumerate() {
        out[p / 64] |= (slot.load(Ordering::Acquire) & 1) << (p % 64);
    }
    out
}

/// Guard positions a set of cell changes covers: each `A` index mod 512,
/// counted once.
pub fn affected_positions(cells: &[CellChange]) -> Vec<usize> {
    let mut hit = [false; GUARD_SLOTS];
    for c in cells {
        if c.side == Side::A {
            hit[c.index % GUARD_SLOTS] = true;
        }
    }
    (0..GUARD_SLOTS).filter(|&p| hit[p]).collect()
}

struct Snapshot {
    generation: u64,
    action_width: u32,
    checksum_width: u32,
    sizes: SizePair,
    hashes: HashPair,
    a: Box<[AtomicU64]>,
    b: Box<[AtomicU64]>,
}

impl Snapshot {
    fn from_query_structure(qs: QueryStructure, generation: u64) -> Self {
        let (action_width, checksum_width, sizes, hashes) = (
            qs.action_width(),
            qs.checksum_width(),
            qs.sizes(),
            qs.hashes(),
        );
        let (a, b) = qs.into_arrays();
        Snapshot {
            generation,
            action_width,
            checksum_width,
            sizes,
            hashes,
            a: a.into_iter().map(AtomicU64::new).collect(),
            b: b.into_iter().map(AtomicU64::new).collect(),
        }
    }
}

/// A query structure shared by one updater and any number of readers.
pub struct GuardedQueryStructure {
    current: ArcSwap<Snapshot>,
    generation: AtomicU64,
    guards: GuardPair,
    spin_limit: u32,
    updater: Mutex<()>,
}

impl GuardedQueryStructure {
    pub const DEFAULT_SPIN_LIMIT: u32 = 64;

    pub fn new(qs: QueryStructure) -> Self {
        Self::with_spin_limit(qs, Self::DEFAULT_SPIN_LIMIT)
    }

    /// `spin_limit` failed guard checks in a row make a reader yield.
    pub fn with_spin_limit(qs: QueryStructure, spin_limit: u32) -> Self {
        GuardedQueryStructure {
            current: ArcSwap::from_pointee(Snapshot::from_query_structure(qs, 0)),
            generation: AtomicU64::new(0),
            guards: GuardPair::new(),
            spin_limit: spin_limit.max(1),
            updater: Mutex::new(()),
        }
    }

    pub fn into_shared(self) -> Arc<Self> {
        Arc::new(self)
    }

    pub fn guards(&self) -> &GuardPair {
        &self.guards
    }

    pub fn action_width(&self) -> u32 {
        self.current.load().action_width
    }

    pub fn checksum_width(&self) -> u32 {
        self.current.load().checksum_width
    }

    /// Action bits of the lookup; always a value some complete version of the
    /// structure would have returned.
    #[inline]
    pub fn query(&self, name: &[u8]) -> u64 {
        self.query_probed(name, &mut NoProbe)
    }

    #[inline]
    pub fn query_probed<P: ReadProbe>(&self, name: &[u8], probe: &mut P) -> u64 {
        let (cell, action_width) = self.lookup(name, probe);
        cell & width_mask(action_width)
    }

    /// Whole cell (action and checksum) plus the action width in effect.
    pub fn lookup_cell(&self, name: &[u8]) -> (u64, u32) {
        self.lookup(name, &mut NoProbe)
    }

    fn lookup<P: ReadProbe>(&self, name: &[u8], probe: &mut P) -> (u64, u32) {
        let mut spins = 0u32;
        loop {
            let snap = self.current.load();
            let (i, j) = snap.hashes.indices(name, &snap.sizes);
            let p = i % GUARD_SLOTS;
            let before = self.guards.d2[p].load(Ordering::Acquire);
            // A whole-structure swap bumps the generation between its D1 and
            // D2 flips; a stale snapshot is caught here.
            if self.generation.load(Ordering::Relaxed) == snap.generation {
                probe.cell_read();
                let x = snap.a[i].load(Ordering::Relaxed);
                probe.cell_read();
                let y = snap.b[j].load(Ordering::Relaxed);
                fence(Ordering::Acquire);
                let after = self.guards.d1[p].load(Ordering::Relaxed);
                if before == after {
                    return (x ^ y, snap.action_width);
                }
            }
            spins += 1;
            if spins >= self.spin_limit {
                spins = 0;
                thread::yield_now();
            } else {
                hint::spin_loop();
            }
        }
    }

    /// Applies an update under the guard protocol. Updates are serialized;
    /// a message that fails validation changes nothing, guards included.
    pub fn apply(&self, msg: &UpdateMessage) -> Result<()> {
        let _updater = self.updater.lock().unwrap_or_else(|e| e.into_inner());
        match msg {
            UpdateMessage::Delta(cells) => {
                let snap = self.current.load_full();
                let width = snap.action_width + snap.checksum_width;
                validate_cells(cells, snap.a.len(), snap.b.len(), width)?;
                let affected = affected_positions(cells);
                for &p in &affected {
                    self.guards.d1[p].fetch_add(1, Ordering::Relaxed);
                }
                fence(Ordering::Release);
                for c in cells {
                    let cell = match c.side {
                        Side::A => &snap.a[c.index],
                        Side::B => &snap.b[c.index],
                    };
                    cell.store(c.value, Ordering::Relaxed);
                }
                for &p in &affected {
                    self.guards.d2[p].fetch_add(1, Ordering::Release);
                }
            }
            UpdateMessage::Full(qs) => {
                let generation = self.generation.load(Ordering::Relaxed) + 1;
                let next = Arc::new(Snapshot::from_query_structure(qs.clone(), generation));
                for slot in self.guards.d1.iter() {
                    slot.fetch_add(1, Ordering::Relaxed);
                }
                fence(Ordering::Release);
                self.current.store(next);
                self.generation.store(generation, Ordering::Relaxed);
                for slot in self.guards.d2.iter() {
                    slot.fetch_add(1, Ordering::Release);
                }
            }
        }
        Ok(())
    }

    /// Copies the current contents out. Only meaningful while no update runs.
    pub fn to_query_structure(&self) -> QueryStructure {
        let snap = self.current.load();
        let load = |cells: &[AtomicU64]| cells.iter().map(|c| c.load(Ordering::Acquire)).collect();
        QueryStructure::from_parts(
            snap.action_width,
            snap.checksum_width,
            snap.sizes,
            snap.hashes,
            load(&snap.a),
            load(&snap.b),
        )
        .expect("snapshot holds a valid structure")
    }
}
