//! Grouping of analyzed tweets by state or time bucket, under filters.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Datelike, NaiveDate, Utc, Weekday};
use serde::{Deserialize, Serialize};

use crate::corpus::{AnalyzedTweet, StateCode};
use crate::emotion::{effective_emotions, Emotion, CONTRIBUTION_THRESHOLD};
use crate::sentiment::Polarity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    Day,
    Week,
    Month,
}

impl Granularity {
    pub fn as_str(self) -> &'static str {
        match self {
            Granularity::Day => "day",
            Granularity::Week => "week",
            Granularity::Month => "month",
        }
    }
}

impl FromStr for Granularity {
    type Err = KeyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "day" => Ok(Granularity::Day),
            "week" => Ok(Granularity::Week),
            "month" => Ok(Granularity::Month),
            other => Err(KeyError::UnknownGranularity(other.to_string())),
        }
    }
}

/// The dimension a group key lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupAxis {
    State,
    Day,
    Week,
    Month,
}

impl GroupAxis {
    pub fn time(granularity: Granularity) -> Self {
        match granularity {
            Granularity::Day => GroupAxis::Day,
            Granularity::Week => GroupAxis::Week,
            Granularity::Month => GroupAxis::Month,
        }
    }

    /// Resolves the API's `axis=state|time` plus optional granularity.
    pub fn from_parts(axis: &str, granularity: Option<Granularity>) -> Result<Self, KeyError> {
        match (axis, granularity) {
            ("state", None) => Ok(GroupAxis::State),
            ("state", Some(_)) => Err(KeyError::GranularityOnState),
            ("time", Some(g)) => Ok(GroupAxis::time(g)),
            ("time", None) => Err(KeyError::MissingGranularity),
            (other, _) => Err(KeyError::UnknownAxis(other.to_string())),
        }
    }

    pub fn is_time(self) -> bool {
        self != GroupAxis::State
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GroupAxis::State => "state",
            GroupAxis::Day => "day",
            GroupAxis::Week => "week",
            GroupAxis::Month => "month",
        }
    }
}

impl FromStr for GroupAxis {
    type Err = KeyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "state" => Ok(GroupAxis::State),
            other => other
                .parse::<Granularity>()
                .map(GroupAxis::time)
                .map_err(|_| KeyError::UnknownAxis(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KeyError {
    #[error("unknown axis {0:?}")]
    UnknownAxis(String),
    #[error("unknown granularity {0:?}")]
    UnknownGranularity(String),
    #[error("time axis requires a granularity")]
    MissingGranularity,
    #[error("granularity applies only to the time axis")]
    GranularityOnState,
    #[error("{value:?} is not a valid {axis} key")]
    BadValue { axis: &'static str, value: String },
}

/// A comparison unit: a state code or a time bucket label.
///
/// Values order chronologically on time axes and alphabetically on the
/// state axis, so keys sort by `(axis, value)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupKey {
    pub axis: GroupAxis,
    pub value: String,
}

impl GroupKey {
    pub fn state(code: StateCode) -> Self {
        GroupKey {
            axis: GroupAxis::State,
            value: code.as_str().to_string(),
        }
    }

    /// Validates `value` against the format of `axis`.
    pub fn parse(axis: GroupAxis, value: &str) -> Result<Self, KeyError> {
        let bad = || KeyError::BadValue {
            axis: axis.as_str(),
            value: value.to_string(),
        };
        let canonical = match axis {
            GroupAxis::State => value
                .parse::<StateCode>()
                .map_err(|_| bad())?
                .as_str()
                .to_string(),
            GroupAxis::Day => {
                let d = NaiveDate::parse_from_str(value, "%Y-%m-%d").map_err(|_| bad())?;
                d.format("%Y-%m-%d").to_string()
            }
            GroupAxis::Month => {
                let d = NaiveDate::parse_from_str(&format!("{value}-01"), "%Y-%m-%d")
                    .map_err(|_| bad())?;
                d.format("%Y-%m").to_string()
            }
            GroupAxis::Week => {
                let (year, week) = value.split_once("-W").ok_or_else(bad)?;
                let year: i32 = year.parse().map_err(|_| bad())?;
                let week: u32 = week.parse().map_err(|_| bad())?;
                NaiveDate::from_isoywd_opt(year, week, Weekday::Mon).ok_or_else(bad)?;
                format!("{year:04}-W{week:02}")
            }
        };
        if canonical != value && axis != GroupAxis::State {
            return Err(bad());
        }
        Ok(GroupKey {
            axis,
            value: canonical,
        })
    }

    /// The key of `tweet` on `axis`.
    pub fn of(tweet: &AnalyzedTweet, axis: GroupAxis) -> GroupKey {
        match axis {
            GroupAxis::State => GroupKey::state(tweet.state),
            GroupAxis::Day => bucket_timestamp(tweet.created_at, Granularity::Day),
            GroupAxis::Week => bucket_timestamp(tweet.created_at, Granularity::Week),
            GroupAxis::Month => bucket_timestamp(tweet.created_at, Granularity::Month),
        }
    }
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.value)
    }
}

/// Calendar date, ISO-8601 week (Monday start) or month, all in UTC.
pub fn bucket_timestamp(ts: DateTime<Utc>, granularity: Granularity) -> GroupKey {
    let value = match granularity {
        Granularity::Day => ts.format("%Y-%m-%d").to_string(),
        Granularity::Week => {
            let w = ts.iso_week();
            format!("{:04}-W{:02}", w.year(), w.week())
        }
        Granularity::Month => ts.format("%Y-%m").to_string(),
    };
    GroupKey {
        axis: GroupAxis::time(granularity),
        value,
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FilterError {
    #[error("score range requires an emotion")]
    RangeWithoutEmotion,
    #[error("score range [{0}, {1}] is inverted")]
    InvertedRange(f64, f64),
    #[error("score range [{0}, {1}] is outside [0, 1]")]
    RangeOutOfBounds(f64, f64),
    #[error("time window start is after its end")]
    InvertedTimeWindow,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FilterSpec {
    pub states: Option<BTreeSet<StateCode>>,
    /// Inclusive lower bound.
    pub time_from: Option<DateTime<Utc>>,
    /// Exclusive upper bound.
    pub time_to: Option<DateTime<Utc>>,
    /// Selects the emotion the score range acts on. On its own it does not
    /// remove any tweets.
    pub emotion: Option<Emotion>,
    /// Inclusive `[lo, hi]` on the tweet's score for `emotion`.
    pub score_range: Option<(f64, f64)>,
    /// Drill-down context: only tweets inside this group.
    pub restrict_to: Option<GroupKey>,
}

impl FilterSpec {
    pub fn validate(&self) -> Result<(), FilterError> {
        if let Some((lo, hi)) = self.score_range {
            if self.emotion.is_none() {
                return Err(FilterError::RangeWithoutEmotion);
            }
            if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) {
                return Err(FilterError::RangeOutOfBounds(lo, hi));
            }
            if lo > hi {
                return Err(FilterError::InvertedRange(lo, hi));
            }
        }
        if let (Some(from), Some(to)) = (self.time_from, self.time_to) {
            if from > to {
                return Err(FilterError::InvertedTimeWindow);
            }
        }
        Ok(())
    }

    pub fn matches(&self, t: &AnalyzedTweet) -> bool {
        if let Some(states) = &self.states {
            if !states.contains(&t.state) {
                return false;
            }
        }
        if self.time_from.is_some_and(|from| t.created_at < from) {
            return false;
        }
        if self.time_to.is_some_and(|to| t.created_at >= to) {
            return false;
        }
        if let (Some(emotion), Some((lo, hi))) = (self.emotion, self.score_range) {
            let score = t.emotions.get(emotion);
            if score < lo || score > hi {
                return false;
            }
        }
        if let Some(key) = &self.restrict_to {
            if GroupKey::of(t, key.axis) != *key {
                return false;
            }
        }
        true
    }
}

/// Tweets satisfying every clause of `f`, in input order.
pub fn apply_filters<'a>(tweets: &'a [AnalyzedTweet], f: &FilterSpec) -> Vec<&'a AnalyzedTweet> {
    tweets.iter().filter(|t| f.matches(t)).collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarityCounts {
    pub negative: u64,
    pub neutral: u64,
    pub positive: u64,
}

impl PolarityCounts {
    pub fn add(&mut self, p: Polarity) {
        match p {
            Polarity::Negative => self.negative += 1,
            Polarity::Neutral => self.neutral += 1,
            Polarity::Positive => self.positive += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.negative + self.neutral + self.positive
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmotionMean {
    pub emotion: Emotion,
    /// 0 when nothing contributes.
    pub mean: f64,
    pub contributing_count: u64,
}

/// One dot-plot row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupAggregate {
    pub key: GroupKey,
    pub tweet_count: u64,
    pub polarity_counts: PolarityCounts,
    /// Eight entries in canonical emotion order.
    pub emotion_means: Vec<EmotionMean>,
}

impl GroupAggregate {
    pub fn mean(&self, e: Emotion) -> f64 {
        self.emotion_means[e.index()].mean
    }
}

#[derive(Default)]
struct Accumulator {
    tweet_count: u64,
    polarity: PolarityCounts,
    sums: [f64; 8],
    counts: [u64; 8],
}

impl Accumulator {
    fn add(&mut self, t: &AnalyzedTweet) {
        self.tweet_count += 1;
        self.polarity.add(t.polarity);
        for (e, score) in effective_emotions(&t.emotions, t.category, CONTRIBUTION_THRESHOLD) {
            self.sums[e.index()] += score;
            self.counts[e.index()] += 1;
        }
    }

    fn finish(self, key: GroupKey) -> GroupAggregate {
        let emotion_means = Emotion::ALL
            .into_iter()
            .map(|e| {
                let n = self.counts[e.index()];
                EmotionMean {
                    emotion: e,
                    mean: if n == 0 {
                        0.0
                    } else {
                        self.sums[e.index()] / n as f64
                    },
                    contributing_count: n,
                }
            })
            .collect();
        GroupAggregate {
            key,
            tweet_count: self.tweet_count,
            polarity_counts: self.polarity,
            emotion_means,
        }
    }
}

/// One row per non-empty group, ordered by key. Emotion means average only
/// the tweet's category emotions scoring strictly above the threshold.
pub fn aggregate<'a, I>(tweets: I, axis: GroupAxis) -> Vec<GroupAggregate>
where
    I: IntoIterator<Item = &'a AnalyzedTweet>,
{
    let mut groups: BTreeMap<String, Accumulator> = BTreeMap::new();
    for t in tweets {
        groups
            .entry(GroupKey::of(t, axis).value)
            .or_default()
            .add(t);
    }
    groups
        .into_iter()
        .map(|(value, acc)| acc.finish(GroupKey { axis, value }))
        .collect()
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DrillError {
    #[error("no tweets in group {0}")]
    UnknownGroup(GroupKey),
    #[error("cannot drill from {from} onto {to}: pick the other dimension")]
    SameDimension {
        from: &'static str,
        to: &'static str,
    },
    #[error(transparent)]
    Filter(#[from] FilterError),
}

/// Restricts to `selected` and regroups on `target`, which must be on the
/// other dimension (state versus time).
pub fn drill_down(
    tweets: &[AnalyzedTweet],
    selected: &GroupKey,
    target: GroupAxis,
    filter: &FilterSpec,
) -> Result<Vec<GroupAggregate>, DrillError> {
    if selected.axis.is_time() == target.is_time() {
        return Err(DrillError::SameDimension {
            from: selected.axis.as_str(),
            to: target.as_str(),
        });
    }
    filter.validate()?;
    if !tweets
        .iter()
        .any(|t| GroupKey::of(t, selected.axis) == *selected)
    {
        return Err(DrillError::UnknownGroup(selected.clone()));
    }
    let scoped = FilterSpec {
        restrict_to: Some(selected.clone()),
        ..filter.clone()
    };
    Ok(aggregate(apply_filters(tweets, &scoped), target))
}

/// CSV rows: key, tweet_count, negative, neutral, positive, then
/// `<emotion>_mean`, `<emotion>_n` per emotion in canonical order.
pub fn to_csv(rows: &[GroupAggregate]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "key".to_string(),
        "tweet_count".into(),
        "negative".into(),
        "neutral".into(),
        "positive".into(),
    ];
    for e in Emotion::ALL {
        header.push(format!("{e}_mean"));
        header.push(format!("{e}_n"));
    }
    w.write_record(&header).expect("in-memory write");
    for row in rows {
        let mut rec = vec![
            row.key.value.clone(),
            row.tweet_count.to_string(),
            row.polarity_counts.negative.to_string(),
            row.polarity_counts.neutral.to_string(),
            row.polarity_counts.positive.to_string(),
        ];
        for m in &row.emotion_means {
            rec.push(m.mean.to_string());
            rec.push(m.contributing_count.to_string());
        }
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}
