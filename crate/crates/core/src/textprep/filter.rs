//! Stopword removal and lemmatization.

use alloc::string::String;
use alloc::vec::Vec;

use super::tables::{Stopwords, WordFreq};

const PROTECTED_NEGATIONS: &[&str] = &["not", "no", "never", "nor", "n't"];

pub fn is_protected_negation(token: &str) -> bool {
    PROTECTED_NEGATIONS.contains(&token) || token.ends_with("n't")
}

/// Drops listed stopwords; negations are never dropped.
pub fn remove_stopwords(tokens: &[String], stopwords: &Stopwords) -> Vec<String> {
    tokens.iter().filter(|t| is_protected_negation(t) || !stopwords.contains(t)).cloned().collect()
}

pub fn lemmatize(tokens: &[String], freq: &WordFreq) -> Vec<String> {
    tokens.iter().map(|t| lemma(t, freq)).collect()
}

const IRREGULAR: &[(&str, &str)] = &[
    ("children", "child"),
    ("feet", "foot"),
    ("geese", "goose"),
    ("knives", "knife"),
    ("lives", "life"),
    ("mice", "mouse"),
    ("teeth", "tooth"),
    ("wives", "wife"),
    ("women", "woman"),
    ("went", "go"),
    ("gone", "go"),
    ("said", "say"),
    ("made", "make"),
    ("paid", "pay"),
    ("sold", "sell"),
    ("told", "tell"),
    ("felt", "feel"),
    ("kept", "keep"),
];

/// Words whose suffix looks inflectional but is not.
const UNCHANGED: &[&str] = &[
    "access",
    "address",
    "alias",
    "always",
    "analytics",
    "anything",
    "atlas",
    "bias",
    "bonus",
    "business",
    "campus",
    "ceiling",
    "chaos",
    "does",
    "during",
    "economics",
    "evening",
    "everything",
    "focus",
    "indeed",
    "lens",
    "minus",
    "morning",
    "news",
    "nothing",
    "perhaps",
    "physics",
    "plus",
    "politics",
    "process",
    "series",
    "something",
    "sometimes",
    "species",
    "status",
    "success",
    "thus",
    "unless",
    "virus",
    "wedding",
    "yours",
    "ours",
    "theirs",
];

fn has_vowel(s: &str) -> bool {
    s.bytes().any(|b| matches!(b, b'a' | b'e' | b'i' | b'o' | b'u' | b'y'))
}

fn push_verb_stems(stem: &str, out: &mut Vec<String>) {
    let b = stem.as_bytes();
    let n = b.len();
    if n >= 2 && b[n - 1] == b[n - 2] && !matches!(b[n - 1], b'a' | b'e' | b'i' | b'o' | b'u') {
        out.push(String::from(&stem[..n - 1]));
    }
    if n >= 3 && has_vowel(stem) {
        out.push(String::from(stem));
    }
    if n >= 2 && has_vowel(stem) {
        let mut e = String::from(stem);
        e.push('e');
        out.push(e);
    }
}

fn candidates(word: &str) -> Vec<String> {
    let mut out = Vec::new();
    if let Some(stem) = word.strip_suffix("ies") {
        if stem.len() >= 2 {
            let mut y = String::from(stem);
            y.push('y');
            out.push(y);
        }
    } else if let Some(stem) = word.strip_suffix("es") {
        if word.ends_with("sses") || ["xes", "ches", "shes", "zes", "oes"].iter().any(|s| word.ends_with(s)) {
            out.push(String::from(stem));
        }
        out.push(String::from(&word[..word.len() - 1]));
    } else if word.ends_with('s') && !["ss", "us", "is"].iter().any(|s| word.ends_with(s)) {
        out.push(String::from(&word[..word.len() - 1]));
    }
    if let Some(stem) = word.strip_suffix("ing") {
        push_verb_stems(stem, &mut out);
    }
    if let Some(stem) = word.strip_suffix("ied") {
        let mut y = String::from(stem);
        y.push('y');
        out.push(y);
    } else if let Some(stem) = word.strip_suffix("ed") {
        push_verb_stems(stem, &mut out);
    }
    out
}

/// Suffix-rule lemma checked against the unigram table.
///
/// Candidate base forms come from plural and -ing/-ed rules (with
/// consonant undoubling and e-restoration). The most frequent candidate
/// present in `freq` replaces the word when it is at least as frequent as
/// the word itself, so adjectives like "amazing" keep their form.
pub fn lemma(word: &str, freq: &WordFreq) -> String {
    if let Some(&(_, base)) = IRREGULAR.iter().find(|(w, _)| *w == word) {
        return String::from(base);
    }
    if word.len() < 4 || !word.bytes().all(|b| b.is_ascii_lowercase()) || UNCHANGED.contains(&word) {
        return String::from(word);
    }
    let own = freq.count(word).unwrap_or(0);
    let mut best: Option<(u64, String)> = None;
    for cand in candidates(word) {
        if let Some(c) = freq.count(&cand) {
            if best.as_ref().is_none_or(|(bc, _)| c > *bc) {
                best = Some((c, cand));
            }
        }
    }
    match best {
        Some((count, base)) if count >= own => base,
        _ => String::from(word),
    }
}
