//! Line-oriented lookup tables. `#` starts a comment line; blank lines are skipped.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::bundled;
use crate::error::{Error, Result};

fn data_lines(src: &str) -> impl Iterator<Item = (usize, &str)> {
    src.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

fn split_pair<'a>(line: &'a str, name: &str, lineno: usize) -> Result<(&'a str, &'a str)> {
    let (k, v) =
        line.split_once('\t').ok_or_else(|| Error::parse(name, lineno, "expected two tab-separated columns"))?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() || v.is_empty() {
        return Err(Error::parse(name, lineno, "empty column"));
    }
    Ok((k, v))
}

#[derive(Debug, Clone, Default)]
pub struct Stopwords(BTreeSet<String>);

impl Stopwords {
    pub fn parse(src: &str) -> Result<Self> {
        Ok(Stopwords(data_lines(src).map(|(_, l)| l.trim().to_lowercase()).collect()))
    }

    pub fn bundled() -> Self {
        Self::parse(bundled::STOPWORDS).expect("bundled stopword list parses")
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(token)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Abbreviations(BTreeMap<String, String>);

impl Abbreviations {
    pub fn parse(src: &str, name: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, line) in data_lines(src) {
            let (k, v) = split_pair(line, name, lineno)?;
            map.insert(k.to_lowercase(), v.to_string());
        }
        Ok(Abbreviations(map))
    }

    pub fn bundled() -> Self {
        Self::parse(bundled::ABBREVIATIONS, "abbreviations.tsv").expect("bundled abbreviations parse")
    }

    /// Case-insensitive whole-token lookup.
    pub fn get(&self, token: &str) -> Option<&str> {
        self.0.get(&token.to_lowercase()).map(String::as_str)
    }
}

/// Emoji codepoint sequences (with U+FE0F removed) to `:name:` tokens.
#[derive(Debug, Clone, Default)]
pub struct EmojiTable {
    names: BTreeMap<String, String>,
    max_chars: usize,
}

impl EmojiTable {
    pub fn parse(src: &str, name: &str) -> Result<Self> {
        let mut table = EmojiTable::default();
        for (lineno, line) in data_lines(src) {
            let (codes, emoji_name) = split_pair(line, name, lineno)?;
            let mut key = String::new();
            for hex in codes.split_whitespace() {
                let cp = u32::from_str_radix(hex, 16)
                    .ok()
                    .and_then(char::from_u32)
                    .ok_or_else(|| Error::parse(name, lineno, "invalid codepoint"))?;
                if cp != '\u{FE0F}' {
                    key.push(cp);
                }
            }
            if key.is_empty() {
                return Err(Error::parse(name, lineno, "empty codepoint sequence"));
            }
            if !is_emoji_name(emoji_name) {
                return Err(Error::parse(name, lineno, "name must look like :name:"));
            }
            table.max_chars = table.max_chars.max(key.chars().count());
            table.names.insert(key, emoji_name.to_string());
        }
        Ok(table)
    }

    pub fn bundled() -> Self {
        Self::parse(bundled::EMOJI, "emoji.tsv").expect("bundled emoji table parses")
    }

    pub fn get(&self, seq: &str) -> Option<&str> {
        self.names.get(seq).map(String::as_str)
    }

    pub fn max_chars(&self) -> usize {
        self.max_chars
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn sequences(&self) -> impl Iterator<Item = &str> {
        self.names.keys().map(String::as_str)
    }
}

/// `:lowercase_name:` with only ASCII alphanumerics and underscores inside.
pub fn is_emoji_name(s: &str) -> bool {
    s.len() > 2
        && s.starts_with(':')
        && s.ends_with(':')
        && s[1..s.len() - 1].bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_')
}

/// Unigram counts used by hashtag segmentation and the lemmatizer.
#[derive(Debug, Clone, Default)]
pub struct WordFreq {
    counts: BTreeMap<String, u64>,
    total: u64,
}

impl WordFreq {
    pub fn parse(src: &str, name: &str) -> Result<Self> {
        let mut wf = WordFreq::default();
        for (lineno, line) in data_lines(src) {
            let (word, count) = split_pair(line, name, lineno)?;
            let count: u64 =
                count.parse().map_err(|_| Error::parse(name, lineno, "count must be a non-negative integer"))?;
            wf.insert(word, count);
        }
        Ok(wf)
    }

    pub fn bundled() -> Self {
        Self::parse(bundled::WORDFREQ, "wordfreq.tsv").expect("bundled word frequencies parse")
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, u64)>) -> Self {
        let mut wf = WordFreq::default();
        for (w, c) in pairs {
            wf.insert(w, c);
        }
        wf
    }

    fn insert(&mut self, word: &str, count: u64) {
        let word = word.to_lowercase();
        if let Some(old) = self.counts.insert(word, count) {
            self.total -= old;
        }
        self.total += count;
    }

    pub fn count(&self, word: &str) -> Option<u64> {
        self.counts.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.counts.contains_key(word)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn words(&self) -> Vec<&str> {
        self.counts.keys().map(String::as_str).collect()
    }
}
