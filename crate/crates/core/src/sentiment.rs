//! Rule-based valence scoring: lexicon valence, capitalization emphasis,
//! boosters, negation, exclamation amplification and normalization to a
//! compound score in (-1, 1).

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::textprep::{is_allcaps, TokenizedText};
use crate::LexiconError;

/// Demo lexicon bundled with the crate.
pub const BUNDLED_SENTIMENT_LEXICON: &str = include_str!("../data/sentiment_lexicon.tsv");

/// Scoring constants. Every rule reads its magnitude from here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SentimentConstants {
    /// Added (with the valence's sign) to an all-caps hit in mixed-case text.
    pub caps_emphasis: f64,
    /// Increment for booster entries listed without an explicit value.
    pub booster_default: f64,
    /// How many preceding tokens are checked for boosters.
    pub booster_window: usize,
    /// Multiplier applied to a hit preceded by a negator.
    pub negation_scalar: f64,
    /// How many preceding tokens are checked for a negator.
    pub negation_window: usize,
    /// Per-'!' amplification of the summed valence.
    pub exclamation_step: f64,
    pub exclamation_cap: usize,
    /// The alpha in x / sqrt(x^2 + alpha).
    pub normalization_alpha: f64,
    /// Inclusive |compound| threshold for a non-neutral label.
    pub polarity_threshold: f64,
}

impl Default for SentimentConstants {
    fn default() -> Self {
        SentimentConstants {
            caps_emphasis: 0.733,
            booster_default: 0.293,
            booster_window: 2,
            negation_scalar: -0.74,
            negation_window: 3,
            exclamation_step: 0.292,
            exclamation_cap: 4,
            normalization_alpha: 15.0,
            polarity_threshold: 0.05,
        }
    }
}

/// Maximum absolute valence a lexicon entry may carry.
pub const MAX_VALENCE: f64 = 4.0;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SentimentLexicon {
    valence: HashMap<String, f64>,
    boosters: HashMap<String, f64>,
    negators: HashSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Valence,
    Boosters,
    Negators,
}

impl SentimentLexicon {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED_SENTIMENT_LEXICON).expect("bundled sentiment lexicon is well-formed")
    }

    /// Parses the TSV format: `token<TAB>valence` lines, then optional
    /// `#boosters` (`token<TAB>increment`) and `#negators` (`token`) sections.
    /// A `#valence` marker switches back to valence entries.
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut lex = SentimentLexicon::default();
        let mut section = Section::Valence;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            match line.trim() {
                "#valence" => {
                    section = Section::Valence;
                    continue;
                }
                "#boosters" => {
                    section = Section::Boosters;
                    continue;
                }
                "#negators" => {
                    section = Section::Negators;
                    continue;
                }
                _ => {}
            }

            let malformed = |reason: String| LexiconError::Malformed {
                line: line_no,
                reason,
            };
            let mut fields = line.split('\t');
            let token = fields.next().unwrap_or("").trim().to_lowercase();
            if token.is_empty() {
                return Err(malformed("empty token".into()));
            }
            let value = fields.next().map(str::trim);
            if fields.next().is_some() {
                return Err(malformed("too many fields".into()));
            }

            match section {
                Section::Valence => {
                    let value = value.ok_or_else(|| malformed("missing valence".into()))?;
                    let v: f64 = value
                        .parse()
                        .map_err(|_| malformed(format!("non-numeric valence {value:?}")))?;
                    if !v.is_finite() || v.abs() > MAX_VALENCE {
                        return Err(malformed(format!("valence {v} outside [-4, 4]")));
                    }
                    if lex.valence.insert(token.clone(), v).is_some() {
                        log::warn!("sentiment lexicon line {line_no}: duplicate token {token:?}, keeping last");
                    }
                }
                Section::Boosters => {
                    let inc = match value {
                        Some(v) if !v.is_empty() => v
                            .parse::<f64>()
                            .ok()
                            .filter(|x| x.is_finite())
                            .ok_or_else(|| malformed(format!("non-numeric booster {v:?}")))?,
                        _ => SentimentConstants::default().booster_default,
                    };
                    if lex.boosters.insert(token.clone(), inc).is_some() {
                        log::warn!("sentiment lexicon line {line_no}: duplicate booster {token:?}, keeping last");
                    }
                }
                Section::Negators => {
                    if value.is_some_and(|v| !v.is_empty()) {
                        return Err(malformed("negator lines take no value".into()));
                    }
                    lex.negators.insert(token);
                }
            }
        }
        Ok(lex)
    }

    pub fn valence(&self, token: &str) -> Option<f64> {
        self.valence.get(&token.to_lowercase()).copied()
    }

    pub fn booster(&self, token: &str) -> Option<f64> {
        self.boosters.get(&token.to_lowercase()).copied()
    }

    pub fn is_negator(&self, token: &str) -> bool {
        self.negators.contains(&token.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.valence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valence.is_empty()
    }

    pub fn booster_count(&self) -> usize {
        self.boosters.len()
    }

    pub fn negator_count(&self) -> usize {
        self.negators.len()
    }

    pub fn insert_valence(&mut self, token: &str, valence: f64) {
        self.valence.insert(token.to_lowercase(), valence);
    }

    pub fn insert_booster(&mut self, token: &str, increment: f64) {
        self.boosters.insert(token.to_lowercase(), increment);
    }

    pub fn insert_negator(&mut self, token: &str) {
        self.negators.insert(token.to_lowercase());
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Negative,
    Neutral,
    Positive,
}

impl Polarity {
    pub const ALL: [Polarity; 3] = [Polarity::Negative, Polarity::Neutral, Polarity::Positive];

    pub fn as_str(&self) -> &'static str {
        match self {
            Polarity::Negative => "negative",
            Polarity::Neutral => "neutral",
            Polarity::Positive => "positive",
        }
    }

    /// Display color of the polarity bar segment.
    pub fn color(&self) -> &'static str {
        match self {
            Polarity::Negative => "#d62728",
            Polarity::Neutral => "#1f77b4",
            Polarity::Positive => "#2ca02c",
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarityResult {
    pub compound: f64,
    pub polarity: Polarity,
    pub confidence: f64,
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Unnormalized valence sum of a tokenized text.
///
/// Tokens that are boosters are not scored themselves. Modifiers are
/// applied to each hit in order: caps emphasis, boosters from the
/// preceding window, negation. The exclamation term is added to the total.
pub fn raw_valence(tt: &TokenizedText, lex: &SentimentLexicon, k: &SentimentConstants) -> f64 {
    let tokens = &tt.tokens;
    let any_caps = tokens.iter().any(|t| is_allcaps(t));
    let any_not_caps = tokens
        .iter()
        .any(|t| t.chars().any(char::is_alphabetic) && !is_allcaps(t));
    let caps_differential = any_caps && any_not_caps;

    let mut sum = 0.0;
    for (i, token) in tokens.iter().enumerate() {
        if lex.booster(token).is_some() {
            continue;
        }
        let Some(base) = lex.valence(token) else {
            continue;
        };
        let mut v = base;
        if caps_differential && is_allcaps(token) {
            v += k.caps_emphasis * sign(v);
        }
        for prev in tokens[i.saturating_sub(k.booster_window)..i].iter() {
            if let Some(inc) = lex.booster(prev) {
                v += inc * sign(v);
            }
        }
        if tokens[i.saturating_sub(k.negation_window)..i]
            .iter()
            .any(|p| lex.is_negator(p))
        {
            v *= k.negation_scalar;
        }
        sum += v;
    }

    let bangs = tt.exclamation_count.min(k.exclamation_cap) as f64;
    sum + sign(sum) * k.exclamation_step * bangs
}

/// Maps a raw valence sum into (-1, 1) via x / sqrt(x^2 + alpha).
pub fn normalize_valence(x: f64, alpha: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    x / (x * x + alpha).sqrt()
}

pub fn classify_polarity(compound: f64, threshold: f64) -> PolarityResult {
    let polarity = if compound >= threshold {
        Polarity::Positive
    } else if compound <= -threshold {
        Polarity::Negative
    } else {
        Polarity::Neutral
    };
    PolarityResult {
        compound,
        polarity,
        confidence: compound.abs(),
    }
}

/// Full scorer: lexicon plus constants.
#[derive(Debug, Clone, Default)]
pub struct SentimentScorer {
    pub lexicon: SentimentLexicon,
    pub constants: SentimentConstants,
}

impl SentimentScorer {
    pub fn new(lexicon: SentimentLexicon, constants: SentimentConstants) -> Self {
        SentimentScorer { lexicon, constants }
    }

    pub fn compound(&self, tt: &TokenizedText) -> f64 {
        let raw = raw_valence(tt, &self.lexicon, &self.constants);
        normalize_valence(raw, self.constants.normalization_alpha)
    }

    pub fn score(&self, tt: &TokenizedText) -> PolarityResult {
        classify_polarity(self.compound(tt), self.constants.polarity_threshold)
    }
}
