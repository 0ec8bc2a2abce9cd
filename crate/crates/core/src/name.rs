use std::borrow::Borrow;
use std::fmt;

use crate::error::{Error, Result};

/// An opaque, non-empty byte-string key of at most [`Name::MAX_LEN`] bytes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name(Box<[u8]>);

impl Name {
    pub const MAX_LEN: usize = 512;

    pub fn new(bytes: impl Into<Vec<u8>>) -> Result<Self> {
        let bytes = bytes.into();
        if bytes.is_empty() || bytes.len() > Self::MAX_LEN {
            return Err(Error::InvalidName(bytes.len()));
        }
        Ok(Name(bytes.into_boxed_slice()))
    }

    /// Eight little-endian bytes; handy for numeric identifiers such as MACs.
    pub fn from_u64(value: u64) -> Self {
        Name(value.to_le_bytes().to_vec().into_boxed_slice())
    }

    pub fn from_hex(text: &str) -> Result<Self> {
        let bytes = hex::decode(text.trim()).map_err(|e| Error::InvalidHex(e.to_string()))?;
        Name::new(bytes)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl Borrow<[u8]> for Name {
    fn borrow(&self) -> &[u8] {
        &self.0
    }
}

impl AsRef<[u8]> for Name {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl TryFrom<&[u8]> for Name {
    type Error = Error;

    fn try_from(bytes: &[u8]) -> Result<Self> {
        Name::new(bytes.to_vec())
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Name({})", self.to_hex())
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_bounds() {
        assert_eq!(Name::new(Vec::new()), Err(Error::InvalidName(0)));
        assert!(Name::new(vec![0u8; 512]).is_ok());
        assert_eq!(Name::new(vec![0u8; 513]), Err(Error::InvalidName(513)));
    }

    #[test]
    fn hex_roundtrip() {
        let n = Name::from_hex("00aaBB").unwrap();
        assert_eq!(n.as_bytes(), &[0x00, 0xaa, 0xbb]);
        assert_eq!(n.to_hex(), "00aabb");
        assert!(matches!(Name::from_hex("abc"), Err(Error::InvalidHex(_))));
        assert_eq!(Name::from_hex(""), Err(Error::InvalidName(0)));
    }
}
