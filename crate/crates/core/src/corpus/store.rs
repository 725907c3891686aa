use std::collections::{BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{timestamp, AnalyzedTweet, StateCode};
use crate::canonical::to_canonical_json;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("i/o error on {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("duplicate tweet id {0:?}")]
    DuplicateId(String),
    #[error("{path} line {line}: {reason}")]
    Corrupt {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("meta sidecar disagrees with store: {0}")]
    MetaMismatch(String),
}

impl StoreError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        StoreError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoreMeta {
    pub tweet_count: u64,
    pub rejected_count: u64,
    #[serde(with = "timestamp::option")]
    pub date_min: Option<DateTime<Utc>>,
    #[serde(with = "timestamp::option")]
    pub date_max: Option<DateTime<Utc>>,
    pub states_present: BTreeSet<StateCode>,
}

impl StoreMeta {
    /// Recounts the meta fields from the records themselves.
    pub fn from_records(records: &[AnalyzedTweet], rejected_count: u64) -> Self {
        StoreMeta {
            tweet_count: records.len() as u64,
            rejected_count,
            date_min: records.iter().map(|t| t.created_at).min(),
            date_max: records.iter().map(|t| t.created_at).max(),
            states_present: records.iter().map(|t| t.state).collect(),
        }
    }
}

/// Location of the meta sidecar: `<store>.meta.json`.
pub fn meta_path(store: &Path) -> PathBuf {
    let mut name = store.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn check_unique(records: &[AnalyzedTweet]) -> Result<(), StoreError> {
    let mut seen = HashSet::with_capacity(records.len());
    for t in records {
        if !seen.insert(t.id.as_str()) {
            return Err(StoreError::DuplicateId(t.id.clone()));
        }
    }
    Ok(())
}

/// Writes one JSONL line per record plus the meta sidecar. Nothing is
/// written when the input holds a duplicate id.
pub fn write_store(
    path: impl AsRef<Path>,
    records: &[AnalyzedTweet],
    rejected_count: u64,
) -> Result<StoreMeta, StoreError> {
    let path = path.as_ref();
    check_unique(records)?;

    let file = File::create(path).map_err(|e| StoreError::io(path, e))?;
    let mut out = BufWriter::new(file);
    for t in records {
        serde_json::to_writer(&mut out, t).map_err(|e| StoreError::io(path, e.into()))?;
        out.write_all(b"\n").map_err(|e| StoreError::io(path, e))?;
    }
    out.flush().map_err(|e| StoreError::io(path, e))?;

    let meta = StoreMeta::from_records(records, rejected_count);
    let sidecar = meta_path(path);
    let mut body = to_canonical_json(&meta);
    body.push('\n');
    std::fs::write(&sidecar, body).map_err(|e| StoreError::io(&sidecar, e))?;
    Ok(meta)
}

/// An analyzed dataset loaded into memory. Immutable once opened.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Store {
    tweets: Vec<AnalyzedTweet>,
    meta: StoreMeta,
}

impl Store {
    /// Builds an in-memory store, enforcing id uniqueness.
    pub fn from_records(
        tweets: Vec<AnalyzedTweet>,
        rejected_count: u64,
    ) -> Result<Self, StoreError> {
        check_unique(&tweets)?;
        let meta = StoreMeta::from_records(&tweets, rejected_count);
        Ok(Store { tweets, meta })
    }

    /// Reads a store and its sidecar, checking the sidecar against a recount.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| StoreError::io(path, e))?;
        let mut tweets = Vec::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| StoreError::io(path, e))?;
            if line.is_empty() {
                continue;
            }
            let t: AnalyzedTweet =
                serde_json::from_str(&line).map_err(|e| StoreError::Corrupt {
                    path: path.display().to_string(),
                    line: idx + 1,
                    reason: e.to_string(),
                })?;
            tweets.push(t);
        }

        let sidecar = meta_path(path);
        let text = std::fs::read_to_string(&sidecar).map_err(|e| StoreError::io(&sidecar, e))?;
        let stored: StoreMeta = serde_json::from_str(&text).map_err(|e| StoreError::Corrupt {
            path: sidecar.display().to_string(),
            line: 1,
            reason: e.to_string(),
        })?;

        let store = Store::from_records(tweets, stored.rejected_count)?;
        if store.meta != stored {
            return Err(StoreError::MetaMismatch(format!(
                "sidecar says {} tweets, store holds {}",
                stored.tweet_count, store.meta.tweet_count
            )));
        }
        Ok(store)
    }

    pub fn tweets(&self) -> &[AnalyzedTweet] {
        &self.tweets
    }

    pub fn meta(&self) -> &StoreMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }
}
