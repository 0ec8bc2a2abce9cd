//! Name-to-port FIB on top of the Othello, with optional alien detection.
//!
//! With an `r`-bit checksum scheme each stored value is
//! `checksum(k) << l | action`, so the usual two-read lookup returns both the
//! action and the checksum the controller stored for that cell pair. A name
//! that was never inserted produces a checksum mismatch except with
//! probability about `2^-r`.

use crate::control::{Config, ControlStructure, MutationRecord};
use crate::error::{Error, Result};
use crate::hash::HashAlgorithm;
use crate::name::Name;
use crate::planes::{QueryStructure, UpdateMessage};
use crate::sizes::SizeOption;
use crate::{width_mask, MAX_ACTION_WIDTH, MAX_CELL_WIDTH};

/// Checksum width used when none is given.
pub const DEFAULT_CHECKSUM_WIDTH: u32 = 8;

/// Checksum seed used when none is given. The wire header does not carry it,
/// so switches and controllers agree on this value by convention.
pub const DEFAULT_CHECKSUM_SEED: u32 = 0xC5EC_0DE5;

pub const MAX_CHECKSUM_WIDTH: u32 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChecksumScheme {
    width: u32,
    seed: u32,
    algorithm: HashAlgorithm,
}

impl ChecksumScheme {
    pub fn new(width: u32, seed: u32) -> Result<Self> {
        if width > MAX_CHECKSUM_WIDTH {
            return Err(Error::WidthOverflow {
                action_bits: 0,
                checksum_bits: width,
            });
        }
        Ok(ChecksumScheme {
            width,
            seed,
            algorithm: HashAlgorithm::Xxh3,
        })
    }

    pub fn disabled() -> Self {
        ChecksumScheme {
            width: 0,
            seed: DEFAULT_CHECKSUM_SEED,
            algorithm: HashAlgorithm::Xxh3,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn seed(&self) -> u32 {
        self.seed
    }

    /// `r`-bit digest of `name`. Uses the high half of the digest so it stays
    /// unrelated to the low-bit vertex indices even across algorithms.
    #[inline]
    pub fn checksum(&self, name: &[u8]) -> u64 {
        (self.algorithm.digest(name, self.seed) >> 32) & width_mask(self.width)
    }

    /// Splits a widened cell into action and alien flag.
    #[inline]
    pub fn check(&self, name: &[u8], cell: u64, action_width: u32) -> Lookup {
        let action = cell & width_mask(action_width);
        let alien = self.width > 0 && (cell >> action_width) != self.checksum(name);
        Lookup { action, alien }
    }
}

impl Default for ChecksumScheme {
    fn default() -> Self {
        ChecksumScheme {
            width: DEFAULT_CHECKSUM_WIDTH,
            seed: DEFAULT_CHECKSUM_SEED,
            algorithm: HashAlgorithm::Xxh3,
        }
    }
}

/// Result of a FIB lookup.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lookup {
    pub action: u64,
    /// The name is certainly not in the FIB; the caller should drop.
    pub alien: bool,
}

/// Human-readable labels for the `2^l` actions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ActionTable {
    labels: Vec<String>,
}

impl ActionTable {
    pub fn new(labels: Vec<String>) -> Self {
        ActionTable { labels }
    }

    /// Labels `port0`, `port1`, ... with the last action reserved for `drop`.
    pub fn ports(action_width: u32) -> Self {
        let count = 1usize << action_width.min(16);
        let mut labels: Vec<String> = (0..count - 1).map(|p| format!("port{p}")).collect();
        labels.push("drop".into());
        ActionTable { labels }
    }

    pub fn label(&self, action: u64) -> Option<&str> {
        self.labels
            .get(usize::try_from(action).ok()?)
            .map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Controller-side FIB.
#[derive(Clone, Debug)]
pub struct Fib {
    control: ControlStructure,
    scheme: ChecksumScheme,
    action_width: u32,
    labels: Option<ActionTable>,
}

impl Fib {
    /// Builds over `(name, action)` pairs with `action_width` action bits and
    /// the given checksum scheme (width 0 disables alien detection).
    pub fn build<I>(
        pairs: I,
        action_width: u32,
        scheme: ChecksumScheme,
        option: SizeOption,
        master_seed: u64,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (Name, u64)>,
    {
        let cell_width = action_width + scheme.width;
        if action_width == 0 || action_width > MAX_ACTION_WIDTH || cell_width > MAX_CELL_WIDTH {
            return Err(Error::WidthOverflow {
                action_bits: action_width,
                checksum_bits: scheme.width,
            });
        }
        let mask = width_mask(action_width);
        let widened = pairs
            .into_iter()
            .map(|(name, action)| {
                if action & !mask != 0 {
                    return Err(Error::ActionOutOfRange {
                        action,
                        width: action_width,
                    });
                }
                let value = scheme.checksum(name.as_bytes()) << action_width | action;
                Ok((name, value))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut config = Config::new(cell_width).option(option).seed(master_seed);
        if scheme.width > 0 {
            config = config.reserved_seed(scheme.seed);
        }
        let control = ControlStructure::construct(widened, &config)?;
        Ok(Fib {
            control,
            scheme,
            action_width,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: ActionTable) -> Self {
        self.labels = Some(labels);
        self
    }

    pub fn labels(&self) -> Option<&ActionTable> {
        self.labels.as_ref()
    }

    pub fn action_width(&self) -> u32 {
        self.action_width
    }

    pub fn scheme(&self) -> ChecksumScheme {
        self.scheme
    }

    pub fn control(&self) -> &ControlStructure {
        &self.control
    }

    pub fn len(&self) -> usize {
        self.control.len()
    }

    pub fn is_empty(&self) -> bool {
        self.control.is_empty()
    }

    /// One two-read query; action in the low bits, checksum checked above.
    #[inline]
    pub fn lookup(&self, name: &[u8]) -> Lookup {
        self.scheme
            .check(name, self.control.query(name), self.action_width)
    }

    pub fn action_of(&self, name: &[u8]) -> Option<u64> {
        self.control
            .get(name)
            .map(|v| v & width_mask(self.action_width))
    }

    pub fn add(&mut self, name: Name, action: u64) -> Result<MutationRecord> {
        let value = self.widen(name.as_bytes(), action)?;
        self.control.add(name, value)
    }

    pub fn set_action(&mut self, name: &[u8], action: u64) -> Result<MutationRecord> {
        let value = self.widen(name, action)?;
        self.control.set_action(name, value)
    }

    pub fn delete(&mut self, name: &[u8]) -> Result<MutationRecord> {
        self.control.delete(name)
    }

    pub fn export(&self) -> Result<QueryStructure> {
        QueryStructure::export(&self.control, self.scheme.width)
    }

    pub fn update_message(&self, rec: &MutationRecord) -> Result<UpdateMessage> {
        UpdateMessage::from_mutation(rec, &self.control, self.scheme.width)
    }

    fn widen(&self, name: &[u8], action: u64) -> Result<u64> {
        if action & !width_mask(self.action_width) != 0 {
            return Err(Error::ActionOutOfRange {
                action,
                width: self.action_width,
            });
        }
        Ok(self.scheme.checksum(name) << self.action_width | action)
    }
}

/// Switch-side lookup against an exported structure.
pub fn lookup_in(qs: &QueryStructure, scheme: &ChecksumScheme, name: &[u8]) -> Lookup {
    scheme.check(name, qs.lookup_cell(name), qs.action_width())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pairs(n: usize, l: u32, seed: u64) -> Vec<(Name, u64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n as u64)
            .map(|k| (Name::from_u64(k << 1), rng.random::<u64>() & width_mask(l)))
            .collect()
    }

    #[test]
    fn checksum_is_deterministic_and_narrow() {
        let s = ChecksumScheme::new(8, 77).unwrap();
        for k in 0u64..1000 {
            let c = s.checksum(&k.to_le_bytes());
            assert!(c < 256);
            assert_eq!(c, s.checksum(&k.to_le_bytes()));
        }
        assert!(ChecksumScheme::new(17, 0).is_err());
    }

    #[test]
    fn checksum_pair_collision_rate() {
        // Count equal-checksum pairs exactly from the histogram:
        // sum over buckets of C(count, 2) against C(n, 2) / 256.
        let s = ChecksumScheme::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 100_000u64;
        let mut hist = [0u64; 256];
        for _ in 0..n {
            hist[s.checksum(&rng.random::<u64>().to_le_bytes()) as usize] += 1;
        }
        let pairs: u64 = hist.iter().map(|&c| c * c.saturating_sub(1) / 2).sum();
        let rate = pairs as f64 / (n * (n - 1) / 2) as f64;
        let target = 1.0 / 256.0;
        assert!(
            (rate - target).abs() < 0.2 * target,
            "pair match rate {rate}"
        );
    }

    #[test]
    fn r0_matches_plain_construct() {
        let p = pairs(2000, 8, 1);
        let fib = Fib::build(
            p.clone(),
            8,
            ChecksumScheme::disabled(),
            SizeOption::Skewed,
            5,
        )
        .unwrap();
        let cs = ControlStructure::construct(p.clone(), &Config::new(8).seed(5)).unwrap();
        assert_eq!(fib.control().array_a(), cs.array_a());
        assert_eq!(fib.control().array_b(), cs.array_b());
        for k in 0u64..500 {
            assert!(!fib.lookup(&(k << 1 | 1).to_le_bytes()).alien);
        }
    }

    #[test]
    fn stored_names_never_alien() {
        let p = pairs(5000, 8, 2);
        let fib = Fib::build(
            p.clone(),
            8,
            ChecksumScheme::default(),
            SizeOption::Square,
            1,
        )
        .unwrap();
        let qs = fib.export().unwrap();
        assert_eq!(qs.cell_width(), 16);
        let m = qs.sizes().m_a() as u128;
        assert_eq!(qs.payload_bits(), 2 * (8 + 8) * m);
        for (k, a) in &p {
            assert_eq!(
                fib.lookup(k.as_bytes()),
                Lookup {
                    action: *a,
                    alien: false
                }
            );
            assert_eq!(
                lookup_in(&qs, &fib.scheme(), k.as_bytes()),
                Lookup {
                    action: *a,
                    alien: false
                }
            );
        }
    }

    #[test]
    fn mutations_keep_checksums() {
        let p = pairs(1000, 4, 3);
        let mut fib = Fib::build(
            p.clone(),
            4,
            ChecksumScheme::default(),
            SizeOption::Skewed,
            2,
        )
        .unwrap();
        let mut qs = fib.export().unwrap();
        let rec = fib.add(Name::from_u64(12345), 9).unwrap();
        qs.apply(&fib.update_message(&rec).unwrap()).unwrap();
        let rec = fib.set_action(p[0].0.as_bytes(), 3).unwrap();
        qs.apply(&fib.update_message(&rec).unwrap()).unwrap();
        assert_eq!(
            lookup_in(&qs, &fib.scheme(), &12345u64.to_le_bytes()),
            Lookup {
                action: 9,
                alien: false
            }
        );
        assert_eq!(
            fib.lookup(p[0].0.as_bytes()),
            Lookup {
                action: 3,
                alien: false
            }
        );
        assert_eq!(fib.action_of(p[0].0.as_bytes()), Some(3));
        assert!(matches!(
            fib.add(Name::from_u64(1), 16),
            Err(Error::ActionOutOfRange { .. })
        ));
    }

    #[test]
    fn width_limits() {
        let s = ChecksumScheme::new(16, 1).unwrap();
        assert!(Fib::build(Vec::new(), 48, s, SizeOption::Skewed, 0).is_ok());
        assert!(matches!(
            Fib::build(Vec::new(), 49, s, SizeOption::Skewed, 0),
            Err(Error::WidthOverflow { .. })
        ));
        assert!(matches!(
            Fib::build(
                Vec::new(),
                57,
                ChecksumScheme::disabled(),
                SizeOption::Skewed,
                0
            ),
            Err(Error::WidthOverflow { .. })
        ));
    }

    #[test]
    fn action_labels() {
        let t = ActionTable::ports(2);
        assert_eq!(t.len(), 4);
        assert_eq!(t.label(0), Some("port0"));
        assert_eq!(t.label(3), Some("drop"));
        assert_eq!(t.label(4), None);
    }
}
