//! Side-by-side comparison of two groups' emotion means.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::aggregate::{GroupAggregate, GroupKey};
use crate::emotion::Emotion;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
    #[serde(rename = "none")]
    None,
}

impl Side {
    pub fn mirrored(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
            Side::None => Side::None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::A => "A",
            Side::B => "B",
            Side::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TornadoRow {
    pub emotion: Emotion,
    pub score_a: f64,
    pub score_b: f64,
    /// |score_a - score_b|, drawn as the darker segment on `higher_side`.
    pub delta: f64,
    pub higher_side: Side,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonResult {
    pub key_a: GroupKey,
    pub key_b: GroupKey,
    pub rows: Vec<TornadoRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompareError {
    #[error("cannot compare a {0} group with a {1} group")]
    AxisMismatch(&'static str, &'static str),
    #[error("both sides are group {0}")]
    SameGroup(GroupKey),
}

pub fn compare_groups(
    a: &GroupAggregate,
    b: &GroupAggregate,
) -> Result<ComparisonResult, CompareError> {
    if a.key.axis != b.key.axis {
        return Err(CompareError::AxisMismatch(
            a.key.axis.as_str(),
            b.key.axis.as_str(),
        ));
    }
    if a.key == b.key {
        return Err(CompareError::SameGroup(a.key.clone()));
    }
    let rows = Emotion::ALL
        .into_iter()
        .map(|e| {
            let (score_a, score_b) = (a.mean(e), b.mean(e));
            let higher_side = match score_a.partial_cmp(&score_b) {
                Some(Ordering::Greater) => Side::A,
                Some(Ordering::Less) => Side::B,
                _ => Side::None,
            };
            TornadoRow {
                emotion: e,
                score_a,
                score_b,
                delta: (score_a - score_b).abs(),
                higher_side,
            }
        })
        .collect();
    Ok(ComparisonResult {
        key_a: a.key.clone(),
        key_b: b.key.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregate::{EmotionMean, GroupAxis, PolarityCounts};
    use proptest::prelude::*;

    fn group(axis: GroupAxis, value: &str, means: [f64; 8]) -> GroupAggregate {
        GroupAggregate {
            key: GroupKey {
                axis,
                value: value.into(),
            },
            tweet_count: 1,
            polarity_counts: PolarityCounts::default(),
            emotion_means: Emotion::ALL
                .into_iter()
                .map(|e| EmotionMean {
                    emotion: e,
                    mean: means[e.index()],
                    contributing_count: u64::from(means[e.index()] > 0.0),
                })
                .collect(),
        }
    }

    #[test]
    fn higher_side_and_delta() {
        let mut ma = [0.0; 8];
        let mut mb = [0.0; 8];
        ma[Emotion::Joy.index()] = 0.6;
        mb[Emotion::Joy.index()] = 0.4;
        ma[Emotion::Fear.index()] = 0.3;
        mb[Emotion::Fear.index()] = 0.3;
        let r = compare_groups(
            &group(GroupAxis::State, "CA", ma),
            &group(GroupAxis::State, "NY", mb),
        )
        .unwrap();
        assert_eq!(r.rows.len(), 8);
        let joy = r.rows[Emotion::Joy.index()];
        assert!((joy.delta - 0.2).abs() < 1e-12);
        assert_eq!(joy.higher_side, Side::A);
        let fear = r.rows[Emotion::Fear.index()];
        assert_eq!((fear.delta, fear.higher_side), (0.0, Side::None));
        let order: Vec<_> = r.rows.iter().map(|row| row.emotion).collect();
        assert_eq!(order, Emotion::ALL);
    }

    #[test]
    fn errors() {
        let a = group(GroupAxis::State, "CA", [0.0; 8]);
        assert_eq!(
            compare_groups(&a, &a),
            Err(CompareError::SameGroup(a.key.clone()))
        );
        let m = group(GroupAxis::Month, "2021-01", [0.0; 8]);
        assert!(matches!(
            compare_groups(&a, &m),
            Err(CompareError::AxisMismatch(..))
        ));
        let w = group(GroupAxis::Week, "2021-W01", [0.0; 8]);
        assert!(matches!(
            compare_groups(&w, &m),
            Err(CompareError::AxisMismatch(..))
        ));
    }

    #[test]
    fn serialized_side_names() {
        assert_eq!(serde_json::to_string(&Side::A).unwrap(), "\"A\"");
        assert_eq!(serde_json::to_string(&Side::None).unwrap(), "\"none\"");
    }

    fn means() -> impl Strategy<Value = [f64; 8]> {
        proptest::array::uniform8(prop_oneof![Just(0.0), 0.1f64..=1.0])
    }

    proptest! {
        #[test]
        fn antisymmetric(ma in means(), mb in means()) {
            let a = group(GroupAxis::State, "CA", ma);
            let b = group(GroupAxis::State, "NY", mb);
            let ab = compare_groups(&a, &b).unwrap();
            let ba = compare_groups(&b, &a).unwrap();
            for (x, y) in ab.rows.iter().zip(&ba.rows) {
                prop_assert_eq!(x.delta.to_bits(), y.delta.to_bits());
                prop_assert_eq!(x.higher_side, y.higher_side.mirrored());
                prop_assert!(x.delta <= x.score_a.max(x.score_b));
            }
        }

        #[test]
        fn identical_means_have_zero_delta(m in means()) {
            let r = compare_groups(&group(GroupAxis::Day, "2021-01-01", m), &group(GroupAxis::Day, "2021-01-02", m)).unwrap();
            prop_assert!(r.rows.iter().all(|row| row.delta == 0.0 && row.higher_side == Side::None));
        }
    }
}
