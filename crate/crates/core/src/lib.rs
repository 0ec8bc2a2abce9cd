//! Othello hashing and the Concise forwarding information base.
//!
//! An Othello maps a set of names to `l`-bit actions using two flat arrays
//! `A` (size `m_a`) and `B` (size `m_b`) and a pair of seeded hashes. A lookup
//! is exactly two array reads and one XOR:
//!
//! ```text
//! action(k) = A[h_a(k)] ^ B[h_b(k)]
//! ```
//!
//! The crate is split along the control/data plane boundary:
//!
//! * [`ControlStructure`] owns the key set and the acyclic bipartite graph
//!   behind the arrays, and supports construction, `add`, `set_action` and
//!   `delete`. Every mutation reports the cells it rewrote.
//! * [`QueryStructure`] is the compact data-plane image: sizes, hash seeds and
//!   the two arrays, nothing else. It has a bit-packed wire format and accepts
//!   full or delta [`UpdateMessage`]s.
//! * [`GuardedQueryStructure`] lets one updater and many readers share a query
//!   structure without locks on the read path.
//! * [`Fib`] adds named actions and optional per-name checksums that flag
//!   names that were never inserted.
//!
//! ```
//! use concise::{ControlStructure, Config, Name};
//!
//! let pairs = vec![
//!     (Name::new(b"host-a".to_vec()).unwrap(), 3),
//!     (Name::new(b"host-b".to_vec()).unwrap(), 7),
//! ];
//! let mut cs = ControlStructure::construct(pairs, &Config::new(4)).unwrap();
//! assert_eq!(cs.query(b"host-b"), 7);
//!
//! let rec = cs.set_action(b"host-a", 9).unwrap();
//! assert_eq!(cs.query(b"host-a"), 9);
//! assert!(!rec.new_structure_needed());
//! ```
#![forbid(unsafe_code)]

pub mod bench;
pub mod concurrent;
mod control;
mod error;
pub mod experiment;
pub mod fib;
mod graph;
mod hash;
pub mod input;
pub mod lfsr;
mod name;
pub mod planes;
mod probe;
mod sizes;

pub use concurrent::{GuardPair, GuardedQueryStructure, GUARD_SLOTS};
pub use control::{CellChange, Config, ControlStructure, MutationKind, MutationRecord, Side};
pub use error::{Error, Result};
pub use fib::{ActionTable, ChecksumScheme, Fib, Lookup};
pub use graph::{BipartiteGraph, EdgeId, Vertex};
pub use hash::{HashAlgorithm, HashPair};
pub use name::Name;
pub use planes::{QueryStructure, UpdateMessage};
pub use probe::{NoProbe, ReadCounter, ReadProbe};
pub use sizes::{derive_sizes, payload_bits, SizeOption, SizePair};

/// Widest cell the arrays can hold (action bits plus checksum bits).
pub const MAX_CELL_WIDTH: u32 = 64;

/// Widest action the FIB accepts, leaving room for a checksum in one word.
pub const MAX_ACTION_WIDTH: u32 = 56;

#[inline]
pub(crate) fn width_mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}
