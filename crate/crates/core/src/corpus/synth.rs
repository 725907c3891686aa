//! Deterministic synthetic tweets for demos and tests.
//!
//! Texts are stitched from a fixed phrase pool whose words appear in the
//! bundled lexica, so every emotion and all three polarities occur.
//! States follow rough population weights; timestamps fall in
//! January through May 2021.

use chrono::{DateTime, TimeZone, Utc};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::prelude::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{RawTweet, StateCode};

/// Approximate population per state in units of 100k, in `STATE_CODES` order.
const STATE_WEIGHTS: [u32; 51] = [
    7, 50, 30, 72, 395, 58, 36, 7, 10, 215, 107, 14, 32, 18, 128, 68, 29, 45, 46, 70, 62, 14, 100,
    57, 62, 30, 11, 105, 8, 20, 14, 93, 21, 31, 201, 118, 40, 42, 130, 11, 51, 9, 69, 291, 33, 86,
    6, 77, 59, 18, 6,
];

const POSITIVE: &[&str] = &[
    "finally got my vaccine today and I feel so hopeful",
    "grateful for the nurses and doctors who keep us safe",
    "so happy to see my family again after months apart",
    "the reopening plan looks great, can't wait for summer",
    "trust the science, the vaccine is effective",
    "what a wonderful surprise, my appointment is tomorrow",
    "excited and optimistic about the recovery",
    "celebrate small wins, we are getting stronger together",
    "thankful for friends who support each other",
    "proud of our community, kindness wins",
    "wow, incredible news about the vaccine rollout",
    "feeling blessed and calm today",
    "love seeing people smile again",
    "eager to reopen, the future looks bright",
];

const NEGATIVE: &[&str] = &[
    "so tired of this lockdown, feeling lonely and sad",
    "scared about the new outbreak in my town",
    "furious that people still refuse to wear a mask",
    "this pandemic is a disaster and a tragedy",
    "worried sick about my family in the hospital",
    "disgusting how the government lies about deaths",
    "another shortage, another failure, I am angry",
    "heartbroken, we lost grandpa to the virus",
    "the anxiety and stress never end",
    "reckless and selfish behavior is killing people",
    "panic everywhere, this crisis is terrifying",
    "unemployed and hopeless, what a mess",
    "gross, people coughing everywhere",
    "shocked and upset by the infection numbers",
];

const NEUTRAL: &[&str] = &[
    "covid update for the county",
    "new testing site opens on main street",
    "case numbers released this morning",
    "reading the latest news about the variant",
    "vaccine appointments listed on the state website",
    "press conference at noon",
    "schools announce the spring schedule",
    "waiting for the results",
];

const NEGATED: &[&str] = &[
    "not happy with the rollout",
    "this is not good",
    "never felt this safe",
    "don't trust the numbers",
    "isn't that bad honestly",
    "I don't feel hopeful",
];

const BOOSTED: &[&str] = &[
    "very",
    "really",
    "extremely",
    "totally",
    "barely",
    "slightly",
];

const TAGS: &[&str] = &[
    "#covid19",
    "#vaccine",
    "#StaySafe",
    "#lockdown",
    "@cdcgov",
    "@newsdesk",
    "https://t.co/abc123",
    ":)",
    ":(",
    ":D",
];

fn window() -> (i64, i64) {
    let start = Utc
        .with_ymd_and_hms(2021, 1, 1, 0, 0, 0)
        .unwrap()
        .timestamp();
    let end = Utc
        .with_ymd_and_hms(2021, 6, 1, 0, 0, 0)
        .unwrap()
        .timestamp();
    (start, end)
}

fn compose_text(rng: &mut ChaCha8Rng, mood_positive: f64) -> String {
    let roll: f64 = rng.random();
    let pool = if roll < 0.15 {
        NEUTRAL
    } else if roll < 0.25 {
        NEGATED
    } else if roll < 0.25 + 0.75 * mood_positive {
        POSITIVE
    } else {
        NEGATIVE
    };
    let mut text = pool.choose(rng).expect("pool is non-empty").to_string();

    if rng.random_bool(0.3) {
        let extra = if rng.random_bool(0.5) {
            POSITIVE
        } else {
            NEGATIVE
        };
        let booster = BOOSTED.choose(rng).unwrap();
        let fragment = extra.choose(rng).unwrap();
        text = format!("{text}. {booster} {fragment}");
    }
    if rng.random_bool(0.1) {
        text = text.to_uppercase();
    } else if rng.random_bool(0.15) {
        // emphasize one word
        let words: Vec<&str> = text.split(' ').collect();
        let k = rng.random_range(0..words.len());
        text = words
            .iter()
            .enumerate()
            .map(|(i, w)| {
                if i == k {
                    w.to_uppercase()
                } else {
                    w.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join(" ");
    }
    let bangs = match rng.random_range(0..10) {
        0..=5 => 0,
        6 | 7 => 1,
        8 => 2,
        _ => rng.random_range(3..7),
    };
    text.push_str(&"!".repeat(bangs));
    for _ in 0..rng.random_range(0..3) {
        text.push(' ');
        text.push_str(TAGS.choose(rng).unwrap());
    }
    text
}

/// Generates `n` English, geolocated raw tweets. Identical `(n, seed)`
/// yields identical output.
pub fn synthesize_corpus(n: usize, seed: u64) -> Vec<RawTweet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states = WeightedIndex::new(STATE_WEIGHTS).expect("weights are positive");
    let (start, end) = window();
    let span = (end - start) as f64;

    (0..n)
        .map(|i| {
            let state = StateCode::from_index(states.sample(&mut rng)).expect("index in range");
            let secs = rng.random_range(start..end);
            let created_at = DateTime::from_timestamp(secs, 0).expect("in range");
            // mood drifts positive over the window and varies by state
            let progress = (secs - start) as f64 / span;
            let state_bias = ((state.index() * 7) % 11) as f64 / 11.0 - 0.5;
            let mood = (0.35 + 0.3 * progress + 0.2 * state_bias).clamp(0.05, 0.95);
            RawTweet {
                id: format!("{seed}-{i:07}"),
                text: compose_text(&mut rng, mood),
                created_at,
                state: Some(state),
                lang: "en".to_string(),
            }
        })
        .collect()
}
