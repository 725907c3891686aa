//! Whitespace tokenizer shared by the sentiment and emotion scorers.
//!
//! Case is preserved so the sentiment scorer can detect emphasis; the
//! emotion scorer lowercases on lookup.

use unicode_normalization::UnicodeNormalization;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenizedText {
    pub tokens: Vec<String>,
    /// Every '!' in the input text, uncapped.
    pub exclamation_count: usize,
}

impl TokenizedText {
    /// Builds a token list directly, bypassing the tokenizer rules.
    pub fn from_tokens<I, S>(tokens: I, exclamation_count: usize) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        TokenizedText {
            tokens: tokens.into_iter().map(Into::into).collect(),
            exclamation_count,
        }
    }
}

const OPENERS: &[char] = &['"', '\'', '(', '[', '{', '<', '\u{201c}', '\u{2018}'];

fn is_dropped(piece: &str) -> bool {
    let head = piece.trim_start_matches(OPENERS);
    if head.starts_with('@') {
        return true;
    }
    let prefix: String = head
        .chars()
        .take(8)
        .collect::<String>()
        .to_ascii_lowercase();
    prefix.starts_with("http://") || prefix.starts_with("https://")
}

pub fn tokenize(text: &str) -> TokenizedText {
    let normalized: String = text.nfc().collect();
    let exclamation_count = normalized.chars().filter(|&c| c == '!').count();

    let mut tokens = Vec::new();
    for piece in normalized.split_whitespace() {
        if is_dropped(piece) {
            continue;
        }
        if !piece.chars().any(char::is_alphanumeric) {
            // emoticon candidate such as ":)" or ":-("; kept verbatim
            tokens.push(piece.to_string());
            continue;
        }
        // trims the '#' of hashtags along with other edge punctuation
        let word = piece.trim_matches(|c: char| !c.is_alphanumeric());
        if !word.is_empty() {
            tokens.push(word.to_string());
        }
    }

    TokenizedText {
        tokens,
        exclamation_count,
    }
}

/// True iff the token has at least two letters and all of them are uppercase.
pub fn is_allcaps(token: &str) -> bool {
    let mut letters = 0usize;
    for c in token.chars().filter(|c| c.is_alphabetic()) {
        if !c.is_uppercase() {
            return false;
        }
        letters += 1;
    }
    letters >= 2
}
