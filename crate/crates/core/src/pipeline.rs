//! Validate, tokenize, score and categorize raw tweets.

use crate::corpus::{validate_tweet, AnalyzedTweet, RawTweet, RejectReason, Validation};
use crate::emotion::{assign_category, score_emotions, EmotionLexicon};
use crate::sentiment::{SentimentConstants, SentimentLexicon, SentimentScorer};
use crate::textprep::tokenize;

#[derive(Debug, Clone, Default)]
pub struct Analyzer {
    pub sentiment: SentimentScorer,
    pub emotions: EmotionLexicon,
}

impl Analyzer {
    pub fn new(
        sentiment_lexicon: SentimentLexicon,
        emotion_lexicon: EmotionLexicon,
        constants: SentimentConstants,
    ) -> Self {
        Analyzer {
            sentiment: SentimentScorer::new(sentiment_lexicon, constants),
            emotions: emotion_lexicon,
        }
    }

    /// Analyzer over the demo lexica shipped with the crate.
    pub fn bundled() -> Self {
        Self::new(
            SentimentLexicon::bundled(),
            EmotionLexicon::bundled(),
            SentimentConstants::default(),
        )
    }

    /// Scores a tweet that passed validation; rejects otherwise.
    pub fn analyze(&self, raw: RawTweet) -> Result<AnalyzedTweet, RejectReason> {
        if let Validation::Reject(reason) = validate_tweet(&raw) {
            return Err(reason);
        }
        let state = raw.state.ok_or(RejectReason::NoGeolocation)?;
        let tokens = tokenize(&raw.text);
        let sentiment = self.sentiment.score(&tokens);
        let emotions = score_emotions(&tokens, &self.emotions);
        let category = assign_category(&emotions, sentiment.polarity);
        Ok(AnalyzedTweet {
            id: raw.id,
            text: raw.text,
            created_at: raw.created_at,
            state,
            lang: raw.lang,
            compound: sentiment.compound,
            polarity: sentiment.polarity,
            confidence: sentiment.confidence,
            emotions,
            category,
        })
    }
}
