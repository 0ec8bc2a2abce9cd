//! Fibonacci LFSR name generator.
//!
//! Successive states walk the whole non-zero state space before repeating,
//! which visits every name once per period and defeats caching: the least
//! favourable query stream for a table lookup.

use crate::error::{Error, Result};
use crate::name::Name;

/// Tap masks for maximal-length sequences, indexed by `width - 8`. Bit `t - 1`
/// is set for each tap `t` of the polynomial `x^w + ... + 1`; every entry is a
/// primitive polynomial over GF(2).
const TAPS: [u64; 57] = [
    0xb8,               // 8: 8,6,5,4
    0x110,              // 9: 9,5
    0x240,              // 10: 10,7
    0x500,              // 11: 11,9
    0x829,              // 12: 12,6,4,1
    0x100d,             // 13: 13,4,3,1
    0x2015,             // 14: 14,5,3,1
    0x6000,             // 15: 15,14
    0xd008,             // 16: 16,15,13,4
    0x12000,            // 17: 17,14
    0x20400,            // 18: 18,11
    0x40023,            // 19: 19,6,2,1
    0x90000,            // 20: 20,17
    0x140000,           // 21: 21,19
    0x300000,           // 22: 22,21
    0x420000,           // 23: 23,18
    0xe10000,           // 24: 24,23,22,17
    0x1200000,          // 25: 25,22
    0x2000023,          // 26: 26,6,2,1
    0x4000013,          // 27: 27,5,2,1
    0x9000000,          // 28: 28,25
    0x14000000,         // 29: 29,27
    0x20000029,         // 30: 30,6,4,1
    0x48000000,         // 31: 31,28
    0x80200003,         // 32: 32,22,2,1
    0x100080000,        // 33: 33,20
    0x204000003,        // 34: 34,27,2,1
    0x500000000,        // 35: 35,33
    0x801000000,        // 36: 36,25
    0x100000001f,       // 37: 37,5,4,3,2,1
    0x2000000031,       // 38: 38,6,5,1
    0x4400000000,       // 39: 39,35
    0xa000140000,       // 40: 40,38,21,19
    0x12000000000,      // 41: 41,38
    0x300000c0000,      // 42: 42,41,20,19
    0x63000000000,      // 43: 43,42,38,37
    0xc0000030000,      // 44: 44,43,18,17
    0x1b0000000000,     // 45: 45,44,42,41
    0x300003000000,     // 46: 46,45,26,25
    0x420000000000,     // 47: 47,42
    0xc00000180000,     // 48: 48,47,21,20
    0x1008000000000,    // 49: 49,40
    0x3000000c00000,    // 50: 50,49,24,23
    0x6000c00000000,    // 51: 51,50,36,35
    0x9000000000000,    // 52: 52,49
    0x18003000000000,   // 53: 53,52,38,37
    0x30000000030000,   // 54: 54,53,18,17
    0x40000040000000,   // 55: 55,31
    0xc0000600000000,   // 56: 56,55,35,34
    0x102000000000000,  // 57: 57,50
    0x200004000000000,  // 58: 58,39
    0x600003000000000,  // 59: 59,58,38,37
    0xc00000000000000,  // 60: 60,59
    0x1800300000000000, // 61: 61,60,46,45
    0x3000000000000030, // 62: 62,61,6,5
    0x6000000000000000, // 63: 63,62
    0xd800000000000000, // 64: 64,63,61,60
];

pub const MIN_WIDTH: u32 = 8;
pub const MAX_WIDTH: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lfsr {
    width: u32,
    state: u64,
    taps: u64,
}

impl Lfsr {
    /// `seed` is reduced to `width` bits and must stay non-zero.
    pub fn new(width: u32, seed: u64) -> Result<Self> {
        if !(MIN_WIDTH..=MAX_WIDTH).contains(&width) {
            return Err(Error::InvalidLfsrWidth(width));
        }
        let state = seed & crate::width_mask(width);
        if state == 0 {
            return Err(Error::ZeroState);
        }
        Ok(Lfsr {
            width,
            state,
            taps: TAPS[(width - MIN_WIDTH) as usize],
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn taps(&self) -> u64 {
        self.taps
    }

    /// Advances one step and returns the new state.
    #[inline]
    pub fn step(&mut self) -> u64 {
        let feedback = u64::from((self.state & self.taps).count_ones() & 1);
        self.state = ((self.state << 1) | feedback) & crate::width_mask(self.width);
        self.state
    }

    /// Bytes of a state as a name: `ceil(width / 8)` little-endian bytes.
    #[inline]
    pub fn name_bytes(&self, state: u64) -> ([u8; 8], usize) {
        (state.to_le_bytes(), self.width.div_ceil(8) as usize)
    }

    pub fn next_name(&mut self) -> Name {
        let s = self.step();
        let (bytes, len) = self.name_bytes(s);
        Name::new(bytes[..len].to_vec()).expect("1..=8 bytes")
    }
}

impl Iterator for Lfsr {
    type Item = Name;

    fn next(&mut self) -> Option<Name> {
        Some(self.next_name())
    }
}

/// `count` successive names from `lfsr`.
pub fn lfsr_stream(lfsr: &mut Lfsr, count: usize) -> Vec<Name> {
    lfsr.take(count).collect()
}
