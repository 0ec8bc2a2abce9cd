use crate::control::Side;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("name length {0} is outside 1..=512 bytes")]
    InvalidName(usize),
    #[error("invalid hex name: {0}")]
    InvalidHex(String),
    #[error("name {0} is already stored")]
    DuplicateName(String),
    #[error("name {0} is not stored")]
    KeyNotFound(String),
    #[error("action {action} does not fit in {width} bits")]
    ActionOutOfRange { action: u64, width: u32 },
    #[error("cell width {action_bits}+{checksum_bits} is not in 1..=64")]
    WidthOverflow {
        action_bits: u32,
        checksum_bits: u32,
    },
    #[error("no acyclic hash pair found in {attempts} attempts")]
    ConstructionFailed { attempts: u32 },
    #[error("size {0} is not a power of two")]
    InvalidSize(u64),
    #[error("load factor {load:.4} must be below 1")]
    InvalidLoad { load: f64 },

    #[error("bad magic, expected \"OTHL\"")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u16),
    #[error("unknown hash algorithm id {0}")]
    UnknownHashAlgorithm(u16),
    #[error("corrupt length: expected {expected} bytes, found {actual}")]
    CorruptLength { expected: u128, actual: usize },
    #[error("non-zero padding bits in packed array")]
    NonZeroPadding,
    #[error("unknown update message kind {0:#04x}")]
    UnknownMessageKind(u8),
    #[error("unknown array side tag {0}")]
    BadSide(u8),

    #[error("{side:?}[{index}] is out of range (len {len})")]
    IndexOutOfRange { side: Side, index: u64, len: usize },
    #[error("cell value {value:#x} wider than {width} bits")]
    ValueOutOfRange { value: u64, width: u32 },
    #[error("update does not match the target structure: {0}")]
    StructureMismatch(&'static str),

    #[error("lfsr state must be non-zero")]
    ZeroState,
    #[error("lfsr width {0} is outside 8..=64")]
    InvalidLfsrWidth(u32),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
