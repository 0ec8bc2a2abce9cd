use crate::error::{Error, Result};

/// How `m_b` relates to `m_a` when sizing a fresh structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum SizeOption {
    /// `m_b = m_a`.
    Square = 1,
    /// `m_b` sized independently from `n`, so `m_a` is `m_b` or `2 * m_b`.
    #[default]
    Skewed = 2,
}

impl SizeOption {
    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(SizeOption::Square),
            2 => Some(SizeOption::Skewed),
            _ => None,
        }
    }
}

/// Vertex counts of the two sides; both powers of two.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SizePair {
    m_a: usize,
    m_b: usize,
}

impl SizePair {
    pub fn new(m_a: usize, m_b: usize) -> Result<Self> {
        for m in [m_a, m_b] {
            if !m.is_power_of_two() {
                return Err(Error::InvalidSize(m as u64));
            }
        }
        Ok(SizePair { m_a, m_b })
    }

    pub fn from_log2(log2_a: u8, log2_b: u8) -> Result<Self> {
        if u32::from(log2_a.max(log2_b)) >= usize::BITS {
            return Err(Error::InvalidSize(u64::MAX));
        }
        Ok(SizePair {
            m_a: 1 << log2_a,
            m_b: 1 << log2_b,
        })
    }

    pub fn m_a(&self) -> usize {
        self.m_a
    }

    pub fn m_b(&self) -> usize {
        self.m_b
    }

    pub fn log2_a(&self) -> u8 {
        self.m_a.trailing_zeros() as u8
    }

    pub fn log2_b(&self) -> u8 {
        self.m_b.trailing_zeros() as u8
    }

    #[inline]
    pub(crate) fn mask_a(&self) -> u64 {
        self.m_a as u64 - 1
    }

    #[inline]
    pub(crate) fn mask_b(&self) -> u64 {
        self.m_b as u64 - 1
    }

    /// `c = n / sqrt(m_a * m_b)`; the graph is acyclic with probability
    /// `sqrt(1 - c^2)` for a random hash pair.
    pub fn cycle_load(&self, n: usize) -> f64 {
        n as f64 / ((self.m_a as f64) * (self.m_b as f64)).sqrt()
    }

    /// `p = n (m_a + m_b) / (2 m_a m_b)`; the mean component size of a random
    /// vertex tracks `1 / (1 - p)`.
    pub fn edge_density(&self, n: usize) -> f64 {
        let (a, b) = (self.m_a as f64, self.m_b as f64);
        n as f64 * (a + b) / (2.0 * a * b)
    }
}

/// Smallest power-of-two sizes with `m_a >= 1.33 n` and `m_b >= n` (option 2)
/// or `m_b = m_a` (option 1). Both sides are at least 2.
pub fn derive_sizes(n: usize, option: SizeOption) -> SizePair {
    let scaled = (n as u128 * 133).div_ceil(100) as usize;
    let m_a = scaled.max(2).next_power_of_two();
    let m_b = match option {
        SizeOption::Square => m_a,
        SizeOption::Skewed => n.max(2).next_power_of_two(),
    };
    SizePair { m_a, m_b }
}

/// Bits needed for both packed arrays: `(m_a + m_b) * width`.
pub fn payload_bits(sizes: &SizePair, width: u32) -> u128 {
    (sizes.m_a as u128 + sizes.m_b as u128) * u128::from(width)
}
