//! Eight-emotion scoring from a binary word-emotion association lexicon,
//! feelings-category assignment and the contribution threshold.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::sentiment::Polarity;
use crate::textprep::TokenizedText;
use crate::LexiconError;

pub const BUNDLED_EMOTION_LEXICON: &str = include_str!("../data/emotion_lexicon.tsv");

/// Default floor a per-tweet score must strictly exceed to count toward a mean.
pub const CONTRIBUTION_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emotion {
    Anger,
    Fear,
    Anticipation,
    Trust,
    Surprise,
    Sadness,
    Joy,
    Disgust,
}

impl Emotion {
    /// Canonical order used by every vector, table and payload.
    pub const ALL: [Emotion; 8] = [
        Emotion::Anger,
        Emotion::Fear,
        Emotion::Anticipation,
        Emotion::Trust,
        Emotion::Surprise,
        Emotion::Sadness,
        Emotion::Joy,
        Emotion::Disgust,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Emotion::Anger => "anger",
            Emotion::Fear => "fear",
            Emotion::Anticipation => "anticipation",
            Emotion::Trust => "trust",
            Emotion::Surprise => "surprise",
            Emotion::Sadness => "sadness",
            Emotion::Joy => "joy",
            Emotion::Disgust => "disgust",
        }
    }

    pub fn category(self) -> FeelingCategory {
        match self {
            Emotion::Anticipation | Emotion::Trust | Emotion::Surprise | Emotion::Joy => {
                FeelingCategory::Positive
            }
            Emotion::Anger | Emotion::Fear | Emotion::Sadness | Emotion::Disgust => {
                FeelingCategory::Negative
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown emotion {0:?}")]
pub struct UnknownEmotion(pub String);

impl FromStr for Emotion {
    type Err = UnknownEmotion;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Emotion::ALL
            .into_iter()
            .find(|e| e.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownEmotion(s.to_string()))
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Scores for the eight emotions in canonical order.
///
/// A nonzero vector sums to 1; otherwise every component is 0.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EmotionVector(pub [f64; 8]);

impl EmotionVector {
    pub fn get(&self, e: Emotion) -> f64 {
        self.0[e.index()]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }

    /// Normalizes hit counts into a distribution; all-zero for no hits.
    pub fn from_counts(counts: [u32; 8]) -> Self {
        let total: u32 = counts.iter().sum();
        if total == 0 {
            return EmotionVector::default();
        }
        let total = total as f64;
        EmotionVector(counts.map(|c| c as f64 / total))
    }

    /// Sum of components belonging to `cat`; 0 for `None`.
    pub fn category_sum(&self, cat: FeelingCategory) -> f64 {
        Emotion::ALL
            .into_iter()
            .filter(|e| e.category() == cat)
            .map(|e| self.get(e))
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Emotion, f64)> + '_ {
        Emotion::ALL.into_iter().map(|e| (e, self.get(e)))
    }
}

// Serialized as an object with the eight names in canonical order.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NamedScores {
    anger: f64,
    fear: f64,
    anticipation: f64,
    trust: f64,
    surprise: f64,
    sadness: f64,
    joy: f64,
    disgust: f64,
}

impl Serialize for EmotionVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let [anger, fear, anticipation, trust, surprise, sadness, joy, disgust] = self.0;
        NamedScores {
            anger,
            fear,
            anticipation,
            trust,
            surprise,
            sadness,
            joy,
            disgust,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for EmotionVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let n = NamedScores::deserialize(deserializer)?;
        let v = [
            n.anger,
            n.fear,
            n.anticipation,
            n.trust,
            n.surprise,
            n.sadness,
            n.joy,
            n.disgust,
        ];
        if v.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(serde::de::Error::custom("emotion score outside [0, 1]"));
        }
        Ok(EmotionVector(v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeelingCategory {
    Positive,
    Negative,
    None,
}

impl FeelingCategory {
    pub fn as_str(&self) -> &'static str {
        match self {
            FeelingCategory::Positive => "positive",
            FeelingCategory::Negative => "negative",
            FeelingCategory::None => "none",
        }
    }

    pub fn emotions(self) -> impl Iterator<Item = Emotion> {
        Emotion::ALL
            .into_iter()
            .filter(move |e| e.category() == self)
    }
}

/// Bit set over the eight emotions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct EmotionSet(u8);

impl EmotionSet {
    pub fn insert(&mut self, e: Emotion) {
        self.0 |= 1 << e.index();
    }

    pub fn contains(&self, e: Emotion) -> bool {
        self.0 & (1 << e.index()) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Emotion> + '_ {
        Emotion::ALL.into_iter().filter(|e| self.contains(*e))
    }
}

impl FromIterator<Emotion> for EmotionSet {
    fn from_iter<T: IntoIterator<Item = Emotion>>(iter: T) -> Self {
        let mut set = EmotionSet::default();
        for e in iter {
            set.insert(e);
        }
        set
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmotionLexicon {
    associations: HashMap<String, EmotionSet>,
    /// Rows naming the `positive`/`negative` sentiment columns, which are not emotions.
    pub skipped_sentiment_rows: usize,
}

impl EmotionLexicon {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED_EMOTION_LEXICON).expect("bundled emotion lexicon is well-formed")
    }

    /// Parses `token<TAB>emotion<TAB>flag` rows. Only flag=1 rows create
    /// associations; `positive`/`negative` rows are counted and skipped.
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut lex = EmotionLexicon::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let malformed = |reason: String| LexiconError::Malformed {
                line: line_no,
                reason,
            };
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            let [token, emotion, flag] = fields[..] else {
                return Err(malformed(format!(
                    "expected 3 fields, found {}",
                    fields.len()
                )));
            };
            if token.is_empty() {
                return Err(malformed("empty token".into()));
            }
            let flag = match flag {
                "0" => false,
                "1" => true,
                other => return Err(malformed(format!("bad flag {other:?}"))),
            };
            let emotion = match emotion {
                "positive" | "negative" => {
                    lex.skipped_sentiment_rows += 1;
                    continue;
                }
                name => name
                    .parse::<Emotion>()
                    .map_err(|_| malformed(format!("unknown emotion {name:?}")))?,
            };
            let entry = lex.associations.entry(token.to_lowercase()).or_default();
            if flag {
                entry.insert(emotion);
            }
        }
        lex.associations.retain(|_, set| !set.is_empty());
        Ok(lex)
    }

    pub fn lookup(&self, token: &str) -> EmotionSet {
        self.associations
            .get(&token.to_lowercase())
            .copied()
            .unwrap_or_default()
    }

    pub fn insert(&mut self, token: &str, emotions: EmotionSet) {
        self.associations.insert(token.to_lowercase(), emotions);
    }

    /// Number of tokens with at least one association.
    pub fn len(&self) -> usize {
        self.associations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.associations.is_empty()
    }
}

/// Hit count per emotion divided by the total number of hits.
pub fn score_emotions(tt: &TokenizedText, lex: &EmotionLexicon) -> EmotionVector {
    let mut counts = [0u32; 8];
    for token in &tt.tokens {
        for e in lex.lookup(token).iter() {
            counts[e.index()] += 1;
        }
    }
    EmotionVector::from_counts(counts)
}

// Category sums come from normalized counts, so genuine differences are at
// least 1/total; anything below this is float noise on a tie.
const TIE_EPSILON: f64 = 1e-12;

/// Assigns the category with the higher summed score. A nonzero tie goes
/// to the sentiment polarity (neutral gives `None`).
pub fn assign_category(ev: &EmotionVector, polarity: Polarity) -> FeelingCategory {
    if ev.is_zero() {
        return FeelingCategory::None;
    }
    let pos = ev.category_sum(FeelingCategory::Positive);
    let neg = ev.category_sum(FeelingCategory::Negative);
    let diff = pos - neg;
    if diff > TIE_EPSILON {
        FeelingCategory::Positive
    } else if diff < -TIE_EPSILON {
        FeelingCategory::Negative
    } else {
        match polarity {
            Polarity::Positive => FeelingCategory::Positive,
            Polarity::Negative => FeelingCategory::Negative,
            Polarity::Neutral => FeelingCategory::None,
        }
    }
}

/// Emotions of the tweet's category whose score is strictly above `threshold`.
pub fn effective_emotions(
    ev: &EmotionVector,
    cat: FeelingCategory,
    threshold: f64,
) -> Vec<(Emotion, f64)> {
    cat.emotions()
        .map(|e| (e, ev.get(e)))
        .filter(|&(_, score)| score > threshold)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vector(pairs: &[(Emotion, f64)]) -> EmotionVector {
        let mut v = EmotionVector::default();
        for &(e, x) in pairs {
            v.0[e.index()] = x;
        }
        v
    }

    fn demo_lexicon() -> EmotionLexicon {
        EmotionLexicon::parse(
            "dark\tsadness\t1\ndark\tfear\t1\ndark\tjoy\t0\nhappy\tjoy\t1\nhappy\tpositive\t1\n",
        )
        .unwrap()
    }

    #[test]
    fn categories_partition_the_emotions() {
        let pos: Vec<_> = FeelingCategory::Positive.emotions().collect();
        let neg: Vec<_> = FeelingCategory::Negative.emotions().collect();
        assert_eq!(
            pos,
            [
                Emotion::Anticipation,
                Emotion::Trust,
                Emotion::Surprise,
                Emotion::Joy
            ]
        );
        assert_eq!(
            neg,
            [
                Emotion::Anger,
                Emotion::Fear,
                Emotion::Sadness,
                Emotion::Disgust
            ]
        );
        assert_eq!(FeelingCategory::None.emotions().count(), 0);
    }

    #[test]
    fn loads_flagged_rows_only() {
        let lex = demo_lexicon();
        let dark: Vec<_> = lex.lookup("DARK").iter().collect();
        assert_eq!(dark, [Emotion::Fear, Emotion::Sadness]);
        assert_eq!(lex.skipped_sentiment_rows, 1);
    }

    #[test]
    fn sentiment_rows_are_counted_and_skipped() {
        let lex = EmotionLexicon::parse("dark\tpositive\t1\n").unwrap();
        assert!(lex.lookup("dark").is_empty());
        assert_eq!(lex.skipped_sentiment_rows, 1);
    }

    #[test]
    fn unknown_emotion_is_malformed() {
        let err = EmotionLexicon::parse("dark\tbliss\t1\n").unwrap_err();
        assert!(matches!(err, LexiconError::Malformed { line: 1, .. }));
    }

    #[test]
    fn bad_flag_is_malformed() {
        assert!(EmotionLexicon::parse("dark\tjoy\t2\n").is_err());
        assert!(EmotionLexicon::parse("dark\tjoy\n").is_err());
    }

    #[test]
    fn counts_normalize_over_all_hits() {
        let tt = TokenizedText::from_tokens(["dark", "dark", "happy"], 0);
        let v = score_emotions(&tt, &demo_lexicon());
        assert_eq!(v.get(Emotion::Sadness), 0.4);
        assert_eq!(v.get(Emotion::Fear), 0.4);
        assert_eq!(v.get(Emotion::Joy), 0.2);
        assert_eq!(v.get(Emotion::Anger), 0.0);
    }

    #[test]
    fn no_hits_is_zero_vector() {
        let tt = TokenizedText::from_tokens(["nothing", "here"], 0);
        assert!(score_emotions(&tt, &demo_lexicon()).is_zero());
    }

    #[test]
    fn single_hit() {
        let mut lex = EmotionLexicon::default();
        lex.insert("dark", [Emotion::Sadness].into_iter().collect());
        let v = score_emotions(&TokenizedText::from_tokens(["dark"], 0), &lex);
        assert_eq!(v, vector(&[(Emotion::Sadness, 1.0)]));
    }

    #[test]
    fn category_by_higher_sum() {
        let v = vector(&[
            (Emotion::Joy, 0.2),
            (Emotion::Sadness, 0.4),
            (Emotion::Fear, 0.4),
        ]);
        assert_eq!(
            assign_category(&v, Polarity::Positive),
            FeelingCategory::Negative
        );
    }

    #[test]
    fn category_tie_uses_polarity() {
        let v = vector(&[(Emotion::Joy, 0.5), (Emotion::Anger, 0.5)]);
        assert_eq!(
            assign_category(&v, Polarity::Positive),
            FeelingCategory::Positive
        );
        assert_eq!(
            assign_category(&v, Polarity::Negative),
            FeelingCategory::Negative
        );
        assert_eq!(
            assign_category(&v, Polarity::Neutral),
            FeelingCategory::None
        );
    }

    #[test]
    fn inexact_float_tie_still_ties() {
        // 14 positive vs 14 negative hits, but the float sums differ by an ulp
        let tie = EmotionVector::from_counts([4, 2, 6, 4, 2, 3, 2, 5]);
        assert_ne!(
            tie.category_sum(FeelingCategory::Positive),
            tie.category_sum(FeelingCategory::Negative)
        );
        assert_eq!(
            assign_category(&tie, Polarity::Neutral),
            FeelingCategory::None
        );
        assert_eq!(
            assign_category(&tie, Polarity::Negative),
            FeelingCategory::Negative
        );
    }

    #[test]
    fn zero_vector_has_no_category() {
        for p in Polarity::ALL {
            assert_eq!(
                assign_category(&EmotionVector::default(), p),
                FeelingCategory::None
            );
        }
    }

    #[test]
    fn effective_filters_category_and_threshold() {
        let v = vector(&[
            (Emotion::Joy, 0.5),
            (Emotion::Trust, 0.08),
            (Emotion::Anger, 0.3),
        ]);
        assert_eq!(
            effective_emotions(&v, FeelingCategory::Positive, CONTRIBUTION_THRESHOLD),
            vec![(Emotion::Joy, 0.5)]
        );
    }

    #[test]
    fn threshold_is_strict() {
        let v = vector(&[(Emotion::Joy, 0.1), (Emotion::Trust, 0.9)]);
        assert_eq!(
            effective_emotions(&v, FeelingCategory::Positive, 0.1),
            vec![(Emotion::Trust, 0.9)]
        );
    }

    #[test]
    fn no_category_no_effective_emotions() {
        let v = vector(&[(Emotion::Joy, 1.0)]);
        assert!(effective_emotions(&v, FeelingCategory::None, 0.1).is_empty());
    }

    #[test]
    fn serializes_in_canonical_order() {
        let v = vector(&[(Emotion::Joy, 0.5), (Emotion::Anger, 0.5)]);
        let s = serde_json::to_string(&v).unwrap();
        assert!(
            s.starts_with(r#"{"anger":0.5,"fear":0.0,"anticipation""#),
            "{s}"
        );
        let back: EmotionVector = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        assert!(serde_json::from_str::<EmotionVector>(&s.replace("0.5", "1.5")).is_err());
    }

    #[test]
    fn bundled_lexicon_loads() {
        let lex = EmotionLexicon::bundled();
        assert!(lex.len() > 150);
        assert!(lex.skipped_sentiment_rows > 0);
        for e in Emotion::ALL {
            assert!(
                ["good", "fear", "angry", "sad", "surprise", "trust", "disgust", "wait", "joy"]
                    .iter()
                    .any(|w| lex.lookup(w).contains(e)),
                "no demo word for {e}"
            );
        }
    }

    fn counts() -> impl Strategy<Value = [u32; 8]> {
        proptest::array::uniform8(0u32..20)
    }

    proptest! {
        #[test]
        fn nonzero_vectors_sum_to_one(c in counts()) {
            let v = EmotionVector::from_counts(c);
            let sum: f64 = v.0.iter().sum();
            if c.iter().any(|&x| x > 0) {
                prop_assert!((sum - 1.0).abs() < 1e-9);
            } else {
                prop_assert!(v.is_zero());
            }
        }

        #[test]
        fn category_invariant_under_count_scaling(c in counts(), k in 1u32..7) {
            let v = EmotionVector::from_counts(c);
            let w = EmotionVector::from_counts(c.map(|x| x * k));
            for p in Polarity::ALL {
                prop_assert_eq!(assign_category(&v, p), assign_category(&w, p));
            }
        }

        #[test]
        fn effective_subset_of_category(c in counts(), p in 0usize..3) {
            let v = EmotionVector::from_counts(c);
            let cat = assign_category(&v, Polarity::ALL[p]);
            for (e, s) in effective_emotions(&v, cat, 0.1) {
                prop_assert_eq!(e.category(), cat);
                prop_assert!(s > 0.1);
            }
        }

        #[test]
        fn token_order_does_not_matter(mut words in proptest::collection::vec(
            proptest::sample::select(vec!["dark", "happy", "other", "DARK"]), 0..12)) {
            let lex = demo_lexicon();
            let a = score_emotions(&TokenizedText::from_tokens(words.clone(), 0), &lex);
            words.reverse();
            let b = score_emotions(&TokenizedText::from_tokens(words, 0), &lex);
            prop_assert_eq!(a, b);
        }
    }
}
