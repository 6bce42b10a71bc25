//! Objects are non-empty strings over single-byte symbols.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObjectError {
    #[error("empty object")]
    Empty,
    #[error("non-ASCII symbol at byte {0}")]
    NonAscii(usize),
}

/// A non-empty string of unit symbols (ASCII bytes).
///
/// The derived ordering is plain lexicographic; use [`ObjectString::shortlex_cmp`]
/// when shorter objects must sort first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjectString(Vec<u8>);

impl ObjectString {
    pub fn new(symbols: impl Into<Vec<u8>>) -> Result<Self, ObjectError> {
        let symbols = symbols.into();
        if symbols.is_empty() {
            return Err(ObjectError::Empty);
        }
        if let Some(pos) = symbols.iter().position(|b| !b.is_ascii()) {
            return Err(ObjectError::NonAscii(pos));
        }
        Ok(Self(symbols))
    }

    pub fn symbol(symbol: u8) -> Self {
        Self(vec![symbol])
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn as_str(&self) -> &str {
        // ASCII is checked on construction.
        std::str::from_utf8(&self.0).expect("ascii object")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_unit(&self) -> bool {
        self.0.len() == 1
    }

    pub fn concat(&self, other: &ObjectString) -> ObjectString {
        let mut out = Vec::with_capacity(self.len() + other.len());
        out.extend_from_slice(&self.0);
        out.extend_from_slice(&other.0);
        ObjectString(out)
    }

    /// Distinct symbols, sorted.
    pub fn alphabet(&self) -> BTreeSet<u8> {
        self.0.iter().copied().collect()
    }

    /// Orders by length first, then lexicographically.
    pub fn shortlex_cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }

    pub fn contains(&self, needle: &[u8]) -> bool {
        needle.is_empty() || self.0.windows(needle.len()).any(|w| w == needle)
    }
}

/// The basis of a string object: its distinct unit symbols, sorted.
pub fn basis_of(x: &ObjectString) -> Vec<ObjectString> {
    x.alphabet().into_iter().map(ObjectString::symbol).collect()
}

impl FromStr for ObjectString {
    type Err = ObjectError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(s.as_bytes().to_vec())
    }
}

impl TryFrom<&str> for ObjectString {
    type Error = ObjectError;

    fn try_from(s: &str) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl fmt::Display for ObjectString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for ObjectString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.as_str())
    }
}

impl Serialize for ObjectString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for ObjectString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
