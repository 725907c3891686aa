//! Query parameters and response bodies shared by the CLI and the HTTP API.
//!
//! Both front ends turn their inputs into the same `key=value` parameter
//! list, parse it here, and render responses with [`to_canonical_json`],
//! which is what makes their outputs byte-identical.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::aggregate::{
    aggregate, apply_filters, FilterSpec, Granularity, GroupAggregate, GroupAxis, GroupKey,
};
use crate::canonical::to_canonical_json;
use crate::compare::{compare_groups, CompareError, ComparisonResult};
use crate::corpus::{parse_timestamp, AnalyzedTweet, StateCode, Store, StoreMeta};
use crate::emotion::{Emotion, FeelingCategory, CONTRIBUTION_THRESHOLD};
use crate::sentiment::Polarity;

pub const DEFAULT_PAGE_LIMIT: usize = 50;
pub const MAX_PAGE_LIMIT: usize = 500;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("{0}")]
    BadQuery(String),
    #[error("unknown group {0}")]
    UnknownGroup(String),
    #[error("both sides are group {0}")]
    SameGroup(String),
    #[error("{0}")]
    AxisMismatch(String),
}

impl QueryError {
    /// Machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            QueryError::BadQuery(_) => "bad_query",
            QueryError::UnknownGroup(_) => "unknown_group",
            QueryError::SameGroup(_) => "same_group",
            QueryError::AxisMismatch(_) => "axis_mismatch",
        }
    }
}

impl From<CompareError> for QueryError {
    fn from(e: CompareError) -> Self {
        match e {
            CompareError::SameGroup(k) => QueryError::SameGroup(k.value),
            CompareError::AxisMismatch(..) => QueryError::AxisMismatch(e.to_string()),
        }
    }
}

fn bad(msg: impl Into<String>) -> QueryError {
    QueryError::BadQuery(msg.into())
}

/// Query parameters by name. Later duplicates of a name are an error.
#[derive(Debug, Clone, Default)]
pub struct Params(BTreeMap<String, String>);

impl Params {
    pub fn new<I, K, V>(pairs: I) -> Result<Self, QueryError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        let mut map = BTreeMap::new();
        for (k, v) in pairs {
            let k = k.into();
            if map.insert(k.clone(), v.into()).is_some() {
                return Err(bad(format!("parameter `{k}` given more than once")));
            }
        }
        Ok(Params(map))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn get(&self, name: &str) -> Option<&str> {
        self.0.get(name).map(String::as_str)
    }

    fn check_known(&self, known: &[&str]) -> Result<(), QueryError> {
        match self.0.keys().find(|k| !known.contains(&k.as_str())) {
            Some(k) => Err(bad(format!("unknown parameter `{k}`"))),
            None => Ok(()),
        }
    }

    fn number(&self, name: &str) -> Result<Option<f64>, QueryError> {
        self.get(name)
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| bad(format!("`{name}` is not a number: {v:?}")))
            })
            .transpose()
    }

    fn count(&self, name: &str, default: usize) -> Result<usize, QueryError> {
        match self.get(name) {
            None => Ok(default),
            Some(v) => v
                .trim()
                .parse()
                .map_err(|_| bad(format!("`{name}` is not a non-negative integer: {v:?}"))),
        }
    }

    fn axis(&self) -> Result<GroupAxis, QueryError> {
        let granularity = self
            .get("granularity")
            .map(|g| g.parse::<Granularity>())
            .transpose()
            .map_err(|e| bad(e.to_string()))?;
        // a granularity alone selects the time axis
        let default_axis = if granularity.is_some() {
            "time"
        } else {
            "state"
        };
        GroupAxis::from_parts(self.get("axis").unwrap_or(default_axis), granularity)
            .map_err(|e| bad(e.to_string()))
    }

    fn filter(&self) -> Result<FilterSpec, QueryError> {
        let states = match self.get("states").map(str::trim) {
            None | Some("") => None,
            Some(list) => Some(
                list.split(',')
                    .map(|s| s.parse::<StateCode>().map_err(|e| bad(e.to_string())))
                    .collect::<Result<BTreeSet<_>, _>>()?,
            ),
        };
        let time = |name: &str| {
            self.get(name)
                .map(|v| {
                    parse_time_bound(v)
                        .ok_or_else(|| bad(format!("`{name}` is not a timestamp: {v:?}")))
                })
                .transpose()
        };
        let emotion = self
            .get("emotion")
            .map(|e| e.parse::<Emotion>().map_err(|e| bad(e.to_string())))
            .transpose()?;
        let (min, max) = (self.number("min")?, self.number("max")?);
        let score_range =
            (min.is_some() || max.is_some()).then(|| (min.unwrap_or(0.0), max.unwrap_or(1.0)));
        let restrict_to = match (self.get("restrict_axis"), self.get("restrict_value")) {
            (None, None) => None,
            (Some(axis), Some(value)) => {
                let axis: GroupAxis = axis
                    .parse()
                    .map_err(|e: crate::aggregate::KeyError| bad(e.to_string()))?;
                Some(GroupKey::parse(axis, value).map_err(|e| bad(e.to_string()))?)
            }
            _ => return Err(bad("`restrict_axis` and `restrict_value` go together")),
        };
        let filter = FilterSpec {
            states,
            time_from: time("from")?,
            time_to: time("to")?,
            emotion,
            score_range,
            restrict_to,
        };
        filter.validate().map_err(|e| bad(e.to_string()))?;
        Ok(filter)
    }

    fn key(&self, name: &str, axis: GroupAxis) -> Result<GroupKey, QueryError> {
        let value = self
            .get(name)
            .ok_or_else(|| bad(format!("missing `{name}`")))?;
        GroupKey::parse(axis, value).map_err(|e| {
            let other = [
                GroupAxis::State,
                GroupAxis::Day,
                GroupAxis::Week,
                GroupAxis::Month,
            ]
            .into_iter()
            .find(|&a| a != axis && GroupKey::parse(a, value).is_ok());
            match other {
                Some(a) => QueryError::AxisMismatch(format!(
                    "`{name}`={value:?} is a {} key, query axis is {}",
                    a.as_str(),
                    axis.as_str()
                )),
                None => bad(e.to_string()),
            }
        })
    }
}

/// Accepts a full timestamp or a bare `YYYY-MM-DD` date (midnight UTC).
fn parse_time_bound(v: &str) -> Option<chrono::DateTime<chrono::Utc>> {
    parse_timestamp(v).ok().or_else(|| {
        chrono::NaiveDate::parse_from_str(v.trim(), "%Y-%m-%d")
            .ok()
            .map(|d| d.and_hms_opt(0, 0, 0).expect("midnight").and_utc())
    })
}

const FILTER_PARAMS: [&str; 8] = [
    "states",
    "from",
    "to",
    "emotion",
    "min",
    "max",
    "restrict_axis",
    "restrict_value",
];

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateQuery {
    pub axis: GroupAxis,
    pub filter: FilterSpec,
}

impl AggregateQuery {
    pub fn parse(params: &Params) -> Result<Self, QueryError> {
        let mut known = vec!["axis", "granularity"];
        known.extend(FILTER_PARAMS);
        params.check_known(&known)?;
        Ok(AggregateQuery {
            axis: params.axis()?,
            filter: params.filter()?,
        })
    }

    pub fn run(&self, store: &Store) -> Vec<GroupAggregate> {
        aggregate(apply_filters(store.tweets(), &self.filter), self.axis)
    }
}

pub fn aggregate_body(store: &Store, query: &AggregateQuery) -> String {
    to_canonical_json(&query.run(store))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareQuery {
    pub axis: GroupAxis,
    pub a: GroupKey,
    pub b: GroupKey,
    pub filter: FilterSpec,
}

impl CompareQuery {
    pub fn parse(params: &Params) -> Result<Self, QueryError> {
        let mut known = vec!["axis", "granularity", "a", "b"];
        known.extend(FILTER_PARAMS);
        params.check_known(&known)?;
        let axis = params.axis()?;
        let a = params.key("a", axis)?;
        let b = params.key("b", axis)?;
        if a == b {
            return Err(QueryError::SameGroup(a.value));
        }
        Ok(CompareQuery {
            axis,
            a,
            b,
            filter: params.filter()?,
        })
    }

    pub fn run(&self, store: &Store) -> Result<ComparisonResult, QueryError> {
        let rows = aggregate(apply_filters(store.tweets(), &self.filter), self.axis);
        let find = |key: &GroupKey| {
            rows.iter()
                .find(|r| r.key == *key)
                .ok_or_else(|| QueryError::UnknownGroup(key.value.clone()))
        };
        Ok(compare_groups(find(&self.a)?, find(&self.b)?)?)
    }
}

pub fn compare_body(store: &Store, query: &CompareQuery) -> Result<String, QueryError> {
    query.run(store).map(|r| to_canonical_json(&r))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TweetsQuery {
    pub key: GroupKey,
    pub limit: usize,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TweetsPage {
    pub key: GroupKey,
    pub total: usize,
    pub offset: usize,
    pub limit: usize,
    pub tweets: Vec<AnalyzedTweet>,
}

impl TweetsQuery {
    pub fn parse(params: &Params) -> Result<Self, QueryError> {
        params.check_known(&["axis", "granularity", "value", "limit", "offset"])?;
        let axis = params.axis()?;
        let key = params.key("value", axis)?;
        let limit = params.count("limit", DEFAULT_PAGE_LIMIT)?;
        if limit > MAX_PAGE_LIMIT {
            return Err(bad(format!("limit {limit} exceeds {MAX_PAGE_LIMIT}")));
        }
        Ok(TweetsQuery {
            key,
            limit,
            offset: params.count("offset", 0)?,
        })
    }

    /// Tweets of the group ordered by `(created_at, id)`.
    pub fn run(&self, store: &Store) -> Result<TweetsPage, QueryError> {
        let mut members: Vec<&AnalyzedTweet> = store
            .tweets()
            .iter()
            .filter(|t| GroupKey::of(t, self.key.axis) == self.key)
            .collect();
        if members.is_empty() {
            return Err(QueryError::UnknownGroup(self.key.value.clone()));
        }
        members.sort_by(|x, y| (x.created_at, &x.id).cmp(&(y.created_at, &y.id)));
        Ok(TweetsPage {
            key: self.key.clone(),
            total: members.len(),
            offset: self.offset,
            limit: self.limit,
            tweets: members
                .into_iter()
                .skip(self.offset)
                .take(self.limit)
                .cloned()
                .collect(),
        })
    }
}

pub fn tweets_body(store: &Store, query: &TweetsQuery) -> Result<String, QueryError> {
    query.run(store).map(|p| to_canonical_json(&p))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetaResponse {
    #[serde(flatten)]
    pub store: StoreMeta,
    pub emotions: Vec<Emotion>,
    pub feeling_categories: BTreeMap<&'static str, Vec<Emotion>>,
    pub polarity_colors: BTreeMap<&'static str, &'static str>,
    pub contribution_threshold: f64,
    pub version: &'static str,
}

impl MetaResponse {
    pub fn new(meta: &StoreMeta) -> Self {
        MetaResponse {
            store: meta.clone(),
            emotions: Emotion::ALL.to_vec(),
            feeling_categories: [FeelingCategory::Positive, FeelingCategory::Negative]
                .into_iter()
                .map(|c| (c.as_str(), c.emotions().collect()))
                .collect(),
            polarity_colors: Polarity::ALL
                .into_iter()
                .map(|p| (p.as_str(), p.color()))
                .collect(),
            contribution_threshold: CONTRIBUTION_THRESHOLD,
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

pub fn meta_body(store: &Store) -> String {
    to_canonical_json(&MetaResponse::new(store.meta()))
}
