use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// The 50 US states plus the District of Columbia, alphabetical by code.
pub const STATE_CODES: [&str; 51] = [
    "AK", "AL", "AR", "AZ", "CA", "CO", "CT", "DC", "DE", "FL", "GA", "HI", "IA", "ID", "IL", "IN",
    "KS", "KY", "LA", "MA", "MD", "ME", "MI", "MN", "MO", "MS", "MT", "NC", "ND", "NE", "NH", "NJ",
    "NM", "NV", "NY", "OH", "OK", "OR", "PA", "RI", "SC", "SD", "TN", "TX", "UT", "VA", "VT", "WA",
    "WI", "WV", "WY",
];

/// A validated two-letter state code, one of [`STATE_CODES`].
///
/// Stored as an index into the table so the type is `Copy` and orders
/// alphabetically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateCode(u8);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown state code {0:?}")]
pub struct UnknownState(pub String);

impl StateCode {
    pub fn all() -> impl Iterator<Item = StateCode> {
        (0..STATE_CODES.len() as u8).map(StateCode)
    }

    pub fn as_str(&self) -> &'static str {
        STATE_CODES[self.0 as usize]
    }

    pub fn index(&self) -> usize {
        self.0 as usize
    }

    pub fn from_index(index: usize) -> Option<StateCode> {
        (index < STATE_CODES.len()).then_some(StateCode(index as u8))
    }
}

impl FromStr for StateCode {
    type Err = UnknownState;

    /// Case-insensitive; surrounding whitespace is ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        STATE_CODES
            .binary_search(&upper.as_str())
            .map(|i| StateCode(i as u8))
            .map_err(|_| UnknownState(s.to_string()))
    }
}

impl fmt::Display for StateCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for StateCode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for StateCode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
