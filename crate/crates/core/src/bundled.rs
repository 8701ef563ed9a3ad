//! Data tables compiled into the crate. Each has a file-backed equivalent
//! with the same format so deployments can override them.

pub const LEXICON: &str = include_str!("../data/lexicon.tsv");
pub const EMOJI_VALENCE: &str = include_str!("../data/emoji_valence.tsv");
pub const SLANG: &str = include_str!("../data/slang.tsv");
pub const STOPWORDS: &str = include_str!("../data/stopwords.txt");
pub const ABBREVIATIONS: &str = include_str!("../data/abbreviations.tsv");
pub const EMOJI: &str = include_str!("../data/emoji.tsv");
pub const WORDFREQ: &str = include_str!("../data/wordfreq.tsv");
pub const REFERENCE_MODEL: &str = include_str!("../data/reference_model.json");
