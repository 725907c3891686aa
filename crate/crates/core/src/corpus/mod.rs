//! Tweet records: parsing, validation, the on-disk store and the
//! synthetic corpus generator.

mod state;
pub mod store;
pub mod synth;

use chrono::{DateTime, NaiveDateTime, Timelike, Utc};
use serde::{Deserialize, Serialize};

use crate::emotion::{EmotionVector, FeelingCategory};
use crate::sentiment::Polarity;

pub use state::{StateCode, UnknownState, STATE_CODES};
pub use store::{write_store, Store, StoreError, StoreMeta};
pub use synth::synthesize_corpus;

/// Second-precision UTC timestamps serialized as `YYYY-MM-DDTHH:MM:SSZ`.
pub mod timestamp {
    use chrono::{DateTime, Utc};
    use serde::{Deserialize, Deserializer, Serializer};

    pub const FORMAT: &str = "%Y-%m-%dT%H:%M:%SZ";

    pub fn format(ts: &DateTime<Utc>) -> String {
        ts.format(FORMAT).to_string()
    }

    pub fn serialize<S: Serializer>(ts: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&ts.format(FORMAT))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DateTime<Utc>, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_timestamp(&s).map_err(serde::de::Error::custom)
    }

    pub mod option {
        use super::*;
        use serde::Serialize;

        pub fn serialize<S: Serializer>(
            ts: &Option<DateTime<Utc>>,
            s: S,
        ) -> Result<S::Ok, S::Error> {
            ts.map(|t| super::format(&t)).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Option<DateTime<Utc>>, D::Error> {
            Option::<String>::deserialize(d)?
                .map(|s| super::super::parse_timestamp(&s).map_err(serde::de::Error::custom))
                .transpose()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bad timestamp {0:?}")]
pub struct BadTimestamp(pub String);

/// Parses an ISO-8601 timestamp, converts it to UTC and truncates to the
/// second. A timestamp without an offset is taken as UTC.
pub fn parse_timestamp(s: &str) -> Result<DateTime<Utc>, BadTimestamp> {
    let s = s.trim();
    let parsed = DateTime::parse_from_rfc3339(s)
        .map(|dt| dt.with_timezone(&Utc))
        .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S%.f").map(|n| n.and_utc()))
        .map_err(|_| BadTimestamp(s.to_string()))?;
    Ok(parsed
        .with_nanosecond(0)
        .expect("zero nanoseconds is valid"))
}

/// An input record as read from raw JSONL.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTweet {
    pub id: String,
    pub text: String,
    pub created_at: DateTime<Utc>,
    /// `None` when the record carries no geolocation.
    pub state: Option<StateCode>,
    pub lang: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("malformed record: {0}")]
    MalformedRecord(String),
    #[error("bad timestamp {0:?}")]
    BadTimestamp(String),
    #[error("bad state {0:?}")]
    BadState(String),
}

#[derive(Deserialize)]
struct RawLine {
    id: Option<String>,
    text: Option<String>,
    created_at: Option<String>,
    state: Option<String>,
    lang: Option<String>,
}

/// Parses one JSONL line. A missing, null or empty `state` parses as
/// `None`; any other missing field is a malformed record.
pub fn parse_raw_tweet(line: &str) -> Result<RawTweet, ParseError> {
    let raw: RawLine =
        serde_json::from_str(line).map_err(|e| ParseError::MalformedRecord(e.to_string()))?;
    let missing = |field: &str| ParseError::MalformedRecord(format!("missing field `{field}`"));

    let id = raw.id.ok_or_else(|| missing("id"))?;
    if id.is_empty() {
        return Err(ParseError::MalformedRecord("empty id".into()));
    }
    let text = raw.text.ok_or_else(|| missing("text"))?;
    let created_at = raw.created_at.ok_or_else(|| missing("created_at"))?;
    let lang = raw.lang.ok_or_else(|| missing("lang"))?;

    let created_at = parse_timestamp(&created_at).map_err(|e| ParseError::BadTimestamp(e.0))?;
    let state = match raw.state.as_deref().map(str::trim) {
        None | Some("") => None,
        Some(code) => Some(
            code.parse::<StateCode>()
                .map_err(|_| ParseError::BadState(code.to_string()))?,
        ),
    };

    Ok(RawTweet {
        id,
        text,
        created_at,
        state,
        lang,
    })
}

/// Serializes a raw tweet back to its input JSONL form.
pub fn raw_tweet_to_json(t: &RawTweet) -> String {
    #[derive(Serialize)]
    struct Out<'a> {
        id: &'a str,
        text: &'a str,
        created_at: String,
        state: Option<&'static str>,
        lang: &'a str,
    }
    serde_json::to_string(&Out {
        id: &t.id,
        text: &t.text,
        created_at: timestamp::format(&t.created_at),
        state: t.state.map(|s| s.as_str()),
        lang: &t.lang,
    })
    .expect("raw tweet serializes")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RejectReason {
    NonEnglish,
    NoGeolocation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validation {
    Accept,
    Reject(RejectReason),
}

/// Keeps English tweets with a US state. The language check compares the
/// primary subtag, case-insensitively.
pub fn validate_tweet(t: &RawTweet) -> Validation {
    let primary = t.lang.split(['-', '_']).next().unwrap_or("");
    if !primary.eq_ignore_ascii_case("en") {
        return Validation::Reject(RejectReason::NonEnglish);
    }
    if t.state.is_none() {
        return Validation::Reject(RejectReason::NoGeolocation);
    }
    Validation::Accept
}

/// A validated tweet enriched with its sentiment and emotion scores.
///
/// Field order here is the store's canonical JSONL field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzedTweet {
    pub id: String,
    pub text: String,
    #[serde(with = "timestamp")]
    pub created_at: DateTime<Utc>,
    pub state: StateCode,
    pub lang: String,
    pub compound: f64,
    pub polarity: Polarity,
    pub confidence: f64,
    pub emotions: EmotionVector,
    pub category: FeelingCategory,
}
