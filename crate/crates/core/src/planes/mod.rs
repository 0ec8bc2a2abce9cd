//! Data-plane image of an Othello and the messages that keep it in sync.
//!
//! A [`QueryStructure`] carries only what a lookup needs: widths, sizes, the
//! hash pair and the two arrays. The controller ships it once in full and then
//! streams [`UpdateMessage::Delta`]s listing rewritten cells, falling back to
//! [`UpdateMessage::Full`] whenever a mutation rebuilt the structure.

mod wire;

pub use wire::{HEADER_LEN, MAGIC, VERSION};

use crate::control::{CellChange, ControlStructure, MutationRecord, Side};
use crate::error::{Error, Result};
use crate::hash::HashPair;
use crate::probe::{NoProbe, ReadProbe};
use crate::sizes::{payload_bits, SizePair};
use crate::{width_mask, MAX_CELL_WIDTH};

/// Switch-side lookup structure: `<m_a, m_b, h_a, h_b, A, B>` plus widths.
///
/// Each cell holds `action_width + checksum_width` bits; the action is in the
/// low bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryStructure {
    action_width: u32,
    checksum_width: u32,
    sizes: SizePair,
    hashes: HashPair,
    a: Vec<u64>,
    b: Vec<u64>,
}

impl QueryStructure {
    /// Assembles a structure from parts, checking widths and array lengths.
    pub fn from_parts(
        action_width: u32,
        checksum_width: u32,
        sizes: SizePair,
        hashes: HashPair,
        a: Vec<u64>,
        b: Vec<u64>,
    ) -> Result<Self> {
        check_widths(action_width, checksum_width)?;
        if a.len() != sizes.m_a() || b.len() != sizes.m_b() {
            return Err(Error::StructureMismatch("array length differs from size"));
        }
        let w = action_width + checksum_width;
        if let Some(&value) = a.iter().chain(&b).find(|&&c| c & !width_mask(w) != 0) {
            return Err(Error::ValueOutOfRange { value, width: w });
        }
        Ok(QueryStructure {
            action_width,
            checksum_width,
            sizes,
            hashes,
            a,
            b,
        })
    }

    /// Copies sizes, seeds and arrays out of a control structure whose cells
    /// already carry `checksum_width` checksum bits above the action.
    pub fn export(cs: &ControlStructure, checksum_width: u32) -> Result<Self> {
        if checksum_width >= cs.width() {
            return Err(Error::WidthOverflow {
                action_bits: cs.width().saturating_sub(checksum_width),
                checksum_bits: checksum_width,
            });
        }
        Ok(QueryStructure {
            action_width: cs.width() - checksum_width,
            checksum_width,
            sizes: cs.sizes(),
            hashes: cs.hashes(),
            a: cs.array_a().to_vec(),
            b: cs.array_b().to_vec(),
        })
    }

    pub fn action_width(&self) -> u32 {
        self.action_width
    }

    pub fn checksum_width(&self) -> u32 {
        self.checksum_width
    }

    pub fn cell_width(&self) -> u32 {
        self.action_width + self.checksum_width
    }

    pub fn sizes(&self) -> SizePair {
        self.sizes
    }

    pub fn hashes(&self) -> HashPair {
        self.hashes
    }

    pub fn array_a(&self) -> &[u64] {
        &self.a
    }

    pub fn array_b(&self) -> &[u64] {
        &self.b
    }

    /// Packed size of both arrays in bits: `(m_a + m_b) * (l + r)`.
    pub fn payload_bits(&self) -> u128 {
        payload_bits(&self.sizes, self.cell_width())
    }

    /// The whole cell, action and checksum bits together.
    #[inline]
    pub fn lookup_cell(&self, name: &[u8]) -> u64 {
        self.lookup_cell_probed(name, &mut NoProbe)
    }

    #[inline]
    pub fn lookup_cell_probed<P: ReadProbe>(&self, name: &[u8], probe: &mut P) -> u64 {
        let (i, j) = self.hashes.indices(name, &self.sizes);
        probe.cell_read();
        let x = self.a[i];
        probe.cell_read();
        let y = self.b[j];
        x ^ y
    }

    /// The action bits of the lookup.
    #[inline]
    pub fn query(&self, name: &[u8]) -> u64 {
        self.lookup_cell(name) & width_mask(self.action_width)
    }

    #[inline]
    pub fn query_probed<P: ReadProbe>(&self, name: &[u8], probe: &mut P) -> u64 {
        self.lookup_cell_probed(name, probe) & width_mask(self.action_width)
    }

    pub fn serialize(&self) -> Vec<u8> {
        wire::encode_structure(self)
    }

    pub fn deserialize(bytes: &[u8]) -> Result<Self> {
        wire::decode_structure(bytes)
    }

    /// Applies a message. A failed delta leaves the structure untouched.
    pub fn apply(&mut self, msg: &UpdateMessage) -> Result<()> {
        match msg {
            UpdateMessage::Full(qs) => {
                *self = qs.clone();
                Ok(())
            }
            UpdateMessage::Delta(cells) => {
                self.validate_delta(cells)?;
                for c in cells {
                    match c.side {
                        Side::A => self.a[c.index] = c.value,
                        Side::B => self.b[c.index] = c.value,
                    }
                }
                Ok(())
            }
        }
    }

    pub(crate) fn validate_delta(&self, cells: &[CellChange]) -> Result<()> {
        validate_cells(cells, self.a.len(), self.b.len(), self.cell_width())
    }

    pub(crate) fn into_arrays(self) -> (Vec<u64>, Vec<u64>) {
        (self.a, self.b)
    }
}

pub(crate) fn validate_cells(
    cells: &[CellChange],
    len_a: usize,
    len_b: usize,
    width: u32,
) -> Result<()> {
    let mask = width_mask(width);
    for c in cells {
        let len = match c.side {
            Side::A => len_a,
            Side::B => len_b,
        };
        if c.index >= len {
            return Err(Error::IndexOutOfRange {
                side: c.side,
                index: c.index as u64,
                len,
            });
        }
        if c.value & !mask != 0 {
            return Err(Error::ValueOutOfRange {
                value: c.value,
                width,
            });
        }
    }
    Ok(())
}

pub(crate) fn check_widths(action_width: u32, checksum_width: u32) -> Result<()> {
    if action_width == 0 || action_width + checksum_width > MAX_CELL_WIDTH {
        return Err(Error::WidthOverflow {
            action_bits: action_width,
            checksum_bits: checksum_width,
        });
    }
    Ok(())
}

/// Controller-to-switch update.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UpdateMessage {
    /// Replace the whole structure; used when sizes or seeds changed.
    Full(QueryStructure),
    /// Overwrite the listed cells; sizes and seeds are unchanged.
    Delta(Vec<CellChange>),
}

impl UpdateMessage {
    /// Turns a mutation record into the message the switch needs.
    pub fn from_mutation(
        rec: &MutationRecord,
        cs: &ControlStructure,
        checksum_width: u32,
    ) -> Result<Self> {
        if rec.new_structure_needed() {
            Ok(UpdateMessage::Full(QueryStructure::export(
                cs,
                checksum_width,
            )?))
        } else {
            Ok(UpdateMessage::Delta(rec.changed_cells.clone()))
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        wire::encode_message(self)
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        wire::decode_message(bytes)
    }

    /// Number of entries for a delta, `None` for a full replacement.
    pub fn delta_len(&self) -> Option<usize> {
        match self {
            UpdateMessage::Full(_) => None,
            UpdateMessage::Delta(cells) => Some(cells.len()),
        }
    }
}
