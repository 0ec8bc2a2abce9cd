//! Binary formats.
//!
//! Query structure ("OTHL"), all integers little-endian:
//!
//! ```text
//! offset  size  field
//!      0     4  magic "OTHL"
//!      4     2  format version (1)
//!      6     2  hash algorithm id
//!      8     1  action width l
//!      9     1  checksum width r
//!     10     1  log2 m_a
//!     11     1  log2 m_b
//!     12     4  seed_a
//!     16     4  seed_b
//!     20     -  A: m_a cells of l+r bits, packed, padded to a byte
//!      -     -  B: m_b cells of l+r bits, packed, padded to a byte
//! ```
//!
//! Cell `t` of an array occupies stream bits `[t*w, (t+1)*w)`, where stream
//! bit `k` is bit `k % 8` of byte `k / 8`. Padding bits must be zero.
//!
//! Update message: one kind byte, then
//!
//! * `0x01` Full: u64 payload length, then an OTHL structure;
//! * `0x02` Delta: u32 entry count, then per entry a side byte (0 = A,
//!   1 = B), a u64 index and a u64 cell value.

use super::{check_widths, QueryStructure, UpdateMessage};
use crate::control::{CellChange, Side};
use crate::error::{Error, Result};
use crate::hash::{HashAlgorithm, HashPair};
use crate::sizes::SizePair;
use crate::width_mask;

pub const MAGIC: [u8; 4] = *b"OTHL";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 20;

const KIND_FULL: u8 = 0x01;
const KIND_DELTA: u8 = 0x02;
const DELTA_ENTRY_LEN: usize = 17;

pub(super) fn encode_structure(qs: &QueryStructure) -> Vec<u8> {
    let w = qs.cell_width();
    let len = HEADER_LEN + packed_len(qs.a.len(), w) + packed_len(qs.b.len(), w);
    let mut out = Vec::with_capacity(len);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&qs.hashes.algorithm.id().to_le_bytes());
    out.push(qs.action_width as u8);
    out.push(qs.checksum_width as u8);
    out.push(qs.sizes.log2_a());
    out.push(qs.sizes.log2_b());
    out.extend_from_slice(&qs.hashes.seed_a.to_le_bytes());
    out.extend_from_slice(&qs.hashes.seed_b.to_le_bytes());
    pack(&qs.a, w, &mut out);
    pack(&qs.b, w, &mut out);
    debug_assert_eq!(out.len(), len);
    out
}

pub(super) fn decode_structure(bytes: &[u8]) -> Result<QueryStructure> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::CorruptLength {
            expected: HEADER_LEN as u128,
            actual: bytes.len(),
        });
    }
    if bytes[0..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let algorithm_id = u16::from_le_bytes([bytes[6], bytes[7]]);
    let algorithm =
        HashAlgorithm::from_id(algorithm_id).ok_or(Error::UnknownHashAlgorithm(algorithm_id))?;
    let (l, r) = (u32::from(bytes[8]), u32::from(bytes[9]));
    check_widths(l, r)?;
    let w = l + r;
    let (log2_a, log2_b) = (bytes[10], bytes[11]);
    let seed_a = u32::from_le_bytes(bytes[12..16].try_into().unwrap());
    let seed_b = u32::from_le_bytes(bytes[16..20].try_into().unwrap());

    // Sizes are checked against the input length before anything is allocated.
    let packed_bytes = |log2: u8| (1u128 << log2) * u128::from(w);
    let expected = if log2_a < 64 && log2_b < 64 {
        HEADER_LEN as u128 + packed_bytes(log2_a).div_ceil(8) + packed_bytes(log2_b).div_ceil(8)
    } else {
        u128::MAX
    };
    if expected != bytes.len() as u128 {
        return Err(Error::CorruptLength {
            expected,
            actual: bytes.len(),
        });
    }
    let sizes = SizePair::from_log2(log2_a, log2_b)?;

    let split = HEADER_LEN + packed_len(sizes.m_a(), w);
    let a = unpack(&bytes[HEADER_LEN..split], sizes.m_a(), w)?;
    let b = unpack(&bytes[split..], sizes.m_b(), w)?;
    Ok(QueryStructure {
        action_width: l,
        checksum_width: r,
        sizes,
        hashes: HashPair {
            algorithm,
            seed_a,
            seed_b,
        },
        a,
        b,
    })
}

pub(super) fn encode_message(msg: &UpdateMessage) -> Vec<u8> {
    match msg {
        UpdateMessage::Full(qs) => {
            let body = encode_structure(qs);
            let mut out = Vec::with_capacity(9 + body.len());
            out.push(KIND_FULL);
            out.extend_from_slice(&(body.len() as u64).to_le_bytes());
            out.extend_from_slice(&body);
            out
        }
        UpdateMessage::Delta(cells) => {
            let mut out = Vec::with_capacity(5 + cells.len() * DELTA_ENTRY_LEN);
            out.push(KIND_DELTA);
            out.extend_from_slice(&(cells.len() as u32).to_le_bytes());
            for c in cells {
                out.push(match c.side {
                    Side::A => 0,
                    Side::B => 1,
                });
                out.extend_from_slice(&(c.index as u64).to_le_bytes());
                out.extend_from_slice(&c.value.to_le_bytes());
            }
            out
        }
    }
}

pub(super) fn decode_message(bytes: &[u8]) -> Result<UpdateMessage> {
    let (&kind, rest) = bytes.split_first().ok_or(Error::CorruptLength {
        expected: 1,
        actual: 0,
    })?;
    match kind {
        KIND_FULL => {
            if rest.len() < 8 {
                return Err(Error::CorruptLength {
                    expected: 9,
                    actual: bytes.len(),
                });
            }
            let len = u64::from_le_bytes(rest[..8].try_into().unwrap());
            let body = &rest[8..];
            if len as u128 != body.len() as u128 {
                return Err(Error::CorruptLength {
                    expected: 9 + len as u128,
                    actual: bytes.len(),
                });
            }
            decode_structure(body).map(UpdateMessage::Full)
        }
        KIND_DELTA => {
            if rest.len() < 4 {
                return Err(Error::CorruptLength {
                    expected: 5,
                    actual: bytes.len(),
                });
            }
            let count = u32::from_le_bytes(rest[..4].try_into().unwrap()) as usize;
            let body = &rest[4..];
            let expected = 5 + count as u128 * DELTA_ENTRY_LEN as u128;
            if expected != bytes.len() as u128 {
                return Err(Error::CorruptLength {
                    expected,
                    actual: bytes.len(),
                });
            }
            let mut cells = Vec::with_capacity(count);
            for entry in body.chunks_exact(DELTA_ENTRY_LEN) {
                let side = match entry[0] {
                    0 => Side::A,
                    1 => Side::B,
                    other => return Err(Error::BadSide(other)),
                };
                let index = u64::from_le_bytes(entry[1..9].try_into().unwrap());
                let value = u64::from_le_bytes(entry[9..17].try_into().unwrap());
                let index = usize::try_from(index).map_err(|_| Error::IndexOutOfRange {
                    side,
                    index,
                    len: 0,
                })?;
                cells.push(CellChange { side, index, value });
            }
            Ok(UpdateMessage::Delta(cells))
        }
        other => Err(Error::UnknownMessageKind(other)),
    }
}

fn packed_len(cells: usize, width: u32) -> usize {
    (cells * width as usize).div_ceil(8)
}

fn pack(cells: &[u64], width: u32, out: &mut Vec<u8>) {
    let mask = width_mask(width);
    let mut acc: u128 = 0;
    let mut bits = 0u32;
    for &c in cells {
        acc |= u128::from(c & mask) << bits;
        bits += width;
        while bits >= 8 {
            out.push(acc as u8);
            acc >>= 8;
            bits -= 8;
        }
    }
    if bits > 0 {
        out.push(acc as u8);
    }
}

fn unpack(bytes: &[u8], cells: usize, width: u32) -> Result<Vec<u64>> {
    let mask = width_mask(width);
    let mut out = Vec::with_capacity(cells);
    let mut acc: u128 = 0;
    let mut bits = 0u32;
    let mut input = bytes.iter();
    for _ in 0..cells {
        while bits < width {
            // Length was validated by the caller.
            acc |= u128::from(*input.next().expect("length checked")) << bits;
            bits += 8;
        }
        out.push(acc as u64 & mask);
        acc >>= width;
        bits -= width;
    }
    if acc != 0 || input.next().is_some() {
        return Err(Error::NonZeroPadding);
    }
    Ok(out)
}
