//! Three-stage text preparation: noise removal, normalization, then
//! tokenization and filtering, with a per-model profile choosing stages.
//!
//! Stage order is fixed: strip_noise → lowercase → emoji_to_text →
//! expand_abbreviations → segment_hashtags → tokenize → remove_stopwords
//! → lemmatize. Lowercasing would erase all-caps emphasis, so the pipeline
//! also runs a case-preserving shadow copy through the same stages and
//! records, per output token, whether it was written in capitals.

mod abbrev;
mod emoji;
mod filter;
mod hashtag;
mod noise;
mod tables;
mod tokenize;

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use abbrev::expand_abbreviations;
pub use emoji::emoji_to_text;
pub use filter::{is_protected_negation, lemma, lemmatize, remove_stopwords};
pub use hashtag::{segment_hashtag, word_score};
pub use noise::{is_emoji_char, is_emoticon, strip_noise, strip_noise_with, NoiseOptions, EMOTICONS};
pub use tables::{is_emoji_name, Abbreviations, EmojiTable, Stopwords, WordFreq};
pub use tokenize::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrepProfile {
    pub strip_urls: bool,
    pub strip_mentions: bool,
    pub strip_special: bool,
    pub lowercase: bool,
    pub emoji_to_text: bool,
    pub expand_abbreviations: bool,
    pub segment_hashtags: bool,
    pub tokenize: bool,
    pub remove_stopwords: bool,
    pub lemmatize: bool,
}

impl PrepProfile {
    /// Input profile for the lexicon engine: every stage enabled.
    pub const VADER: PrepProfile = PrepProfile {
        strip_urls: true,
        strip_mentions: true,
        strip_special: true,
        lowercase: true,
        emoji_to_text: true,
        expand_abbreviations: true,
        segment_hashtags: true,
        tokenize: true,
        remove_stopwords: true,
        lemmatize: true,
    };

    /// Input profile for the contextual classifier: keeps stopwords and inflections.
    pub const CONTEXTUAL: PrepProfile = PrepProfile { remove_stopwords: false, lemmatize: false, ..PrepProfile::VADER };

    pub fn by_name(name: &str) -> Option<PrepProfile> {
        match name {
            "vader" => Some(PrepProfile::VADER),
            "contextual" => Some(PrepProfile::CONTEXTUAL),
            _ => None,
        }
    }

    fn noise(&self) -> NoiseOptions {
        NoiseOptions { urls: self.strip_urls, mentions: self.strip_mentions, special: self.strip_special }
    }
}

/// Tokens plus the caps-emphasis shadow: `caps[i]` is set when token `i`
/// was fully upper-case in the original text and the text mixed cases.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TokenSequence {
    pub tokens: Vec<String>,
    pub caps: Vec<bool>,
    pub source_text: String,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn joined(&self) -> String {
        self.tokens.join(" ")
    }
}

/// Read-only tables shared by every preprocessing call.
#[derive(Debug, Clone)]
pub struct Resources {
    pub stopwords: Stopwords,
    pub abbreviations: Abbreviations,
    pub emoji: EmojiTable,
    pub wordfreq: WordFreq,
}

impl Resources {
    pub fn bundled() -> Self {
        Resources {
            stopwords: Stopwords::bundled(),
            abbreviations: Abbreviations::bundled(),
            emoji: EmojiTable::bundled(),
            wordfreq: WordFreq::bundled(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Preprocessor {
    resources: Resources,
}

impl Preprocessor {
    pub fn new(resources: Resources) -> Self {
        Preprocessor { resources }
    }

    pub fn bundled() -> Self {
        Self::new(Resources::bundled())
    }

    pub fn resources(&self) -> &Resources {
        &self.resources
    }

    pub fn segment_hashtag(&self, tag: &str) -> Vec<String> {
        segment_hashtag(tag, &self.resources.wordfreq)
    }

    pub fn preprocess(&self, text: &str, profile: &PrepProfile) -> TokenSequence {
        let res = &self.resources;
        let mut main = strip_noise_with(text, profile.noise());
        let mut shadow = main.clone();
        if profile.lowercase {
            main = main.to_lowercase();
        }
        if profile.emoji_to_text {
            main = emoji_to_text(&main, &res.emoji);
            shadow = emoji_to_text(&shadow, &res.emoji);
        }
        if profile.expand_abbreviations {
            main = expand_abbreviations(&main, &res.abbreviations);
            shadow = expand_abbreviations(&shadow, &res.abbreviations);
        }
        if profile.segment_hashtags {
            (main, shadow) = self.segment_hashtags(&main, &shadow, profile.lowercase);
        }

        let (mut tokens, shadow_tokens) = if profile.tokenize {
            (tokenize::tokenize_words(&main), tokenize::tokenize_words(&shadow))
        } else {
            (main.split_whitespace().map(String::from).collect(), shadow.split_whitespace().map(String::from).collect())
        };
        let mut caps = if shadow_tokens.len() == tokens.len() {
            caps_shadow(&shadow_tokens)
        } else {
            alloc::vec![false; tokens.len()]
        };

        if profile.remove_stopwords {
            let keep: Vec<bool> =
                tokens.iter().map(|t| is_protected_negation(t) || !res.stopwords.contains(t)).collect();
            tokens = retain_by(tokens, &keep);
            caps = retain_by(caps, &keep);
        }
        if profile.lemmatize {
            tokens = lemmatize(&tokens, &res.wordfreq);
        }
        TokenSequence { tokens, caps, source_text: String::from(text) }
    }

    /// Segments `#tags` in both copies word by word, taking camel-case hints
    /// from the case-preserving shadow.
    fn segment_hashtags(&self, main: &str, shadow: &str, lowercase: bool) -> (String, String) {
        let main_words: Vec<&str> = main.split_whitespace().collect();
        let shadow_words: Vec<&str> = shadow.split_whitespace().collect();
        let aligned = main_words.len() == shadow_words.len();
        let mut out_main = Vec::with_capacity(main_words.len());
        let mut out_shadow = Vec::with_capacity(shadow_words.len());
        for (i, word) in main_words.iter().enumerate() {
            let source = if aligned { shadow_words[i] } else { word };
            match split_tag(source) {
                Some((body, rest)) => {
                    let spans = hashtag::segment_spans(body, &self.resources.wordfreq);
                    let count = spans.len();
                    for (k, span) in spans.into_iter().enumerate() {
                        let mut original = String::from(&body[span]);
                        if k + 1 == count {
                            original.push_str(rest);
                        }
                        out_main.push(if lowercase { original.to_lowercase() } else { original.clone() });
                        out_shadow.push(original);
                    }
                }
                None => {
                    out_main.push(String::from(*word));
                    out_shadow.push(String::from(source));
                }
            }
        }
        (out_main.join(" "), out_shadow.join(" "))
    }
}

/// `#Body rest` → (`Body`, `rest`) where the body is alphanumeric.
fn split_tag(word: &str) -> Option<(&str, &str)> {
    let after = word.strip_prefix('#')?;
    let end = after.find(|c: char| !c.is_alphanumeric()).unwrap_or(after.len());
    if end == 0 {
        return None;
    }
    Some((&after[..end], &after[end..]))
}

fn is_all_caps(token: &str) -> bool {
    token.chars().any(char::is_alphabetic) && !token.chars().any(char::is_lowercase)
}

/// All-caps marks count only when some, but not all, words are capitalized.
fn caps_shadow(shadow_tokens: &[String]) -> Vec<bool> {
    let words: Vec<&String> = shadow_tokens.iter().filter(|t| t.chars().any(char::is_alphabetic)).collect();
    let capitalized = words.iter().filter(|t| is_all_caps(t)).count();
    let mixed = capitalized > 0 && capitalized < words.len();
    shadow_tokens.iter().map(|t| mixed && is_all_caps(t)).collect()
}

fn retain_by<T>(items: Vec<T>, keep: &[bool]) -> Vec<T> {
    items.into_iter().zip(keep).filter_map(|(item, &k)| k.then_some(item)).collect()
}
