//! Scoring, grouping and comparison engine for tweet emotion analytics.
//!
//! Raw tweets are validated, tokenized, scored for sentiment polarity and
//! eight emotions, then grouped by US state or by day/week/month so two
//! groups can be compared side by side.

pub mod aggregate;
pub mod canonical;
pub mod compare;
pub mod corpus;
pub mod emotion;
pub mod pipeline;
pub mod query;
pub mod sentiment;
pub mod textprep;

pub use aggregate::{FilterSpec, Granularity, GroupAggregate, GroupAxis, GroupKey};
pub use compare::{compare_groups, ComparisonResult};
pub use corpus::{AnalyzedTweet, RawTweet, StateCode, Store, StoreMeta};
pub use emotion::{Emotion, EmotionVector, FeelingCategory};
pub use pipeline::Analyzer;
pub use sentiment::Polarity;

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("cannot read {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed lexicon at line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}
