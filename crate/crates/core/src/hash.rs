use xxhash_rust::xxh3::xxh3_64_with_seed;

use crate::sizes::SizePair;

/// Seeded hash families a structure can be built with. The numeric id is
/// written into the wire header so a reader can refuse a family it lacks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u16)]
pub enum HashAlgorithm {
    /// XXH3-64 keyed with the 32-bit seed zero-extended to 64 bits.
    Xxh3 = 1,
}

impl HashAlgorithm {
    pub fn id(self) -> u16 {
        self as u16
    }

    pub fn from_id(id: u16) -> Option<Self> {
        match id {
            1 => Some(HashAlgorithm::Xxh3),
            _ => None,
        }
    }

    #[inline]
    pub fn digest(self, key: &[u8], seed: u32) -> u64 {
        match self {
            HashAlgorithm::Xxh3 => xxh3_64_with_seed(key, u64::from(seed)),
        }
    }
}

/// `h_a`/`h_b`, fully determined by an algorithm and two 32-bit seeds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HashPair {
    pub algorithm: HashAlgorithm,
    pub seed_a: u32,
    pub seed_b: u32,
}

impl HashPair {
    pub fn new(seed_a: u32, seed_b: u32) -> Self {
        HashPair {
            algorithm: HashAlgorithm::Xxh3,
            seed_a,
            seed_b,
        }
    }

    /// Maps `key` to its `(U, V)` vertex pair. Sizes are powers of two, so the
    /// reduction is a mask of the low digest bits.
    #[inline]
    pub fn indices(&self, key: &[u8], sizes: &SizePair) -> (usize, usize) {
        let ha = self.algorithm.digest(key, self.seed_a);
        let hb = self.algorithm.digest(key, self.seed_b);
        (
            (ha & sizes.mask_a()) as usize,
            (hb & sizes.mask_b()) as usize,
        )
    }
}
