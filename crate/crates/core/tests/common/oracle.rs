//! Naive reference group-by, written without the engine's grouping,
//! bucketing or threshold helpers.

use chrono::Datelike;
use tecvis_core::AnalyzedTweet;

// canonical order: anger, fear, anticipation, trust, surprise, sadness, joy, disgust
const POSITIVE_SET: [usize; 4] = [2, 3, 4, 6];
const NEGATIVE_SET: [usize; 4] = [0, 1, 5, 7];

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRow {
    pub key: String,
    pub tweet_count: u64,
    pub polarity: (u64, u64, u64),
    pub means: [(f64, u64); 8],
}

fn iso_weeks_in(year: i32) -> u32 {
    let p = |y: i32| (y + y.div_euclid(4) - y.div_euclid(100) + y.div_euclid(400)).rem_euclid(7);
    if p(year) == 4 || p(year - 1) == 3 {
        53
    } else {
        52
    }
}

pub fn iso_week_label(date: chrono::NaiveDate) -> String {
    let weekday = date.weekday().number_from_monday() as i32;
    let week = (date.ordinal() as i32 - weekday + 10) / 7;
    let (year, week) = if week < 1 {
        (date.year() - 1, iso_weeks_in(date.year() - 1))
    } else if week as u32 > iso_weeks_in(date.year()) {
        (date.year() + 1, 1)
    } else {
        (date.year(), week as u32)
    };
    format!("{year:04}-W{week:02}")
}

pub fn key_for(t: &AnalyzedTweet, axis: &str) -> String {
    let date = t.created_at.date_naive();
    match axis {
        "state" => t.state.to_string(),
        "day" => format!("{:04}-{:02}-{:02}", date.year(), date.month(), date.day()),
        "week" => iso_week_label(date),
        "month" => format!("{:04}-{:02}", date.year(), date.month()),
        other => panic!("unknown axis {other}"),
    }
}

fn contributes(t: &AnalyzedTweet, emotion: usize) -> Option<f64> {
    let allowed: &[usize] = match t.category.as_str() {
        "positive" => &POSITIVE_SET,
        "negative" => &NEGATIVE_SET,
        _ => &[],
    };
    let score = t.emotions.0[emotion];
    (allowed.contains(&emotion) && score > 0.1).then_some(score)
}

/// Filter-then-group by scanning the whole input once per group.
pub fn naive_group(
    tweets: &[AnalyzedTweet],
    keep: impl Fn(&AnalyzedTweet) -> bool,
    axis: &str,
) -> Vec<OracleRow> {
    let kept: Vec<&AnalyzedTweet> = tweets.iter().filter(|t| keep(t)).collect();
    let mut keys: Vec<String> = kept.iter().map(|t| key_for(t, axis)).collect();
    keys.sort();
    keys.dedup();

    keys.into_iter()
        .map(|key| {
            let members: Vec<&&AnalyzedTweet> =
                kept.iter().filter(|t| key_for(t, axis) == key).collect();
            let count =
                |p: &str| members.iter().filter(|t| t.polarity.as_str() == p).count() as u64;
            let mut means = [(0.0, 0u64); 8];
            for (e, slot) in means.iter_mut().enumerate() {
                let scores: Vec<f64> = members.iter().filter_map(|t| contributes(t, e)).collect();
                if !scores.is_empty() {
                    *slot = (
                        scores.iter().sum::<f64>() / scores.len() as f64,
                        scores.len() as u64,
                    );
                }
            }
            OracleRow {
                key,
                tweet_count: members.len() as u64,
                polarity: (count("negative"), count("neutral"), count("positive")),
                means,
            }
        })
        .collect()
}

/// Panics with a description of the first disagreement.
pub fn assert_matches(rows: &[tecvis_core::GroupAggregate], expected: &[OracleRow], tol: f64) {
    assert_eq!(rows.len(), expected.len(), "group count");
    for (row, exp) in rows.iter().zip(expected) {
        assert_eq!(row.key.value, exp.key);
        assert_eq!(row.tweet_count, exp.tweet_count, "{}", exp.key);
        let pc = row.polarity_counts;
        assert_eq!(
            (pc.negative, pc.neutral, pc.positive),
            exp.polarity,
            "{}",
            exp.key
        );
        for (m, &(mean, n)) in row.emotion_means.iter().zip(&exp.means) {
            assert_eq!(m.contributing_count, n, "{} {}", exp.key, m.emotion);
            assert!(
                (m.mean - mean).abs() <= tol,
                "{} {}: {} vs {}",
                exp.key,
                m.emotion,
                m.mean,
                mean
            );
        }
    }
}
