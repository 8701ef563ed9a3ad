//! Hashtag segmentation by maximum unigram log-probability.
//!
//! Known words score `ln(count / total)`. Unknown words score
//! `ln(0.5 / total) - len * ln(10)`, so a long unknown run is only chosen
//! when nothing better covers it. Single letters other than "a" and "i"
//! have their score tripled. Ties go to fewer words, then to the
//! lexicographically smallest word list.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::Range;

use super::tables::WordFreq;

const UNKNOWN_MASS: f64 = 0.5;
const UNKNOWN_PER_CHAR: f64 = core::f64::consts::LN_10;
const SINGLE_LETTER_FACTOR: f64 = 3.0;
const MAX_KNOWN_WORD_CHARS: usize = 32;

/// Log-probability score of a single lowercase word.
pub fn word_score(word: &str, freq: &WordFreq) -> f64 {
    let total = freq.total().max(1) as f64;
    let chars = word.chars().count();
    let base = match freq.count(word) {
        Some(count) => libm::log(count.max(1) as f64 / total),
        None => libm::log(UNKNOWN_MASS / total) - chars as f64 * UNKNOWN_PER_CHAR,
    };
    if chars == 1 && word != "a" && word != "i" {
        base * SINGLE_LETTER_FACTOR
    } else {
        base
    }
}

/// Splits `#Tag` into lowercase words. Camel-case boundaries win when every
/// camel piece is a known word; otherwise letters are segmented by dynamic
/// programming. Digit runs stay whole and other characters are dropped.
pub fn segment_hashtag(tag: &str, freq: &WordFreq) -> Vec<String> {
    let body = tag.trim_start_matches('#');
    segment_spans(body, freq).into_iter().map(|r| body[r].to_lowercase()).collect()
}

/// Byte ranges into `body` for each output word, in order.
pub(crate) fn segment_spans(body: &str, freq: &WordFreq) -> Vec<Range<usize>> {
    let mut spans = Vec::new();
    for (run, alphabetic) in char_runs(body) {
        if !alphabetic {
            spans.push(run);
            continue;
        }
        let text = &body[run.clone()];
        let camel = camel_pieces(text);
        let camel_ok = camel.len() > 1 && camel.iter().all(|r| freq.contains(&text[r.clone()].to_lowercase()));
        let pieces = if camel_ok { camel } else { best_split(text, freq) };
        spans.extend(pieces.into_iter().map(|r| run.start + r.start..run.start + r.end));
    }
    spans
}

/// Maximal runs of alphabetic or of numeric characters; anything else separates runs.
fn char_runs(s: &str) -> Vec<(Range<usize>, bool)> {
    let mut runs: Vec<(Range<usize>, bool)> = Vec::new();
    for (i, c) in s.char_indices() {
        let class = if c.is_alphabetic() {
            Some(true)
        } else if c.is_numeric() {
            Some(false)
        } else {
            None
        };
        let end = i + c.len_utf8();
        match (class, runs.last_mut()) {
            (Some(a), Some((r, b))) if *b == a && r.end == i => r.end = end,
            (Some(a), _) => runs.push((i..end, a)),
            (None, _) => {}
        }
    }
    runs
}

/// Case boundaries: `bigNews` → big|News, `XMLParser` → XML|Parser.
fn camel_pieces(s: &str) -> Vec<Range<usize>> {
    let chars: Vec<(usize, char)> = s.char_indices().collect();
    let mut cuts = Vec::new();
    for k in 1..chars.len() {
        let (prev, cur) = (chars[k - 1].1, chars[k].1);
        let next = chars.get(k + 1).map(|&(_, c)| c);
        let lower_to_upper = prev.is_lowercase() && cur.is_uppercase();
        let acronym_end = prev.is_uppercase() && cur.is_uppercase() && next.is_some_and(char::is_lowercase);
        if lower_to_upper || acronym_end {
            cuts.push(chars[k].0);
        }
    }
    let mut pieces = Vec::with_capacity(cuts.len() + 1);
    let mut start = 0;
    for cut in cuts {
        pieces.push(start..cut);
        start = cut;
    }
    pieces.push(start..s.len());
    pieces
}

#[derive(Clone)]
struct Best {
    score: f64,
    words: Vec<String>,
    spans: Vec<Range<usize>>,
}

fn better(a: &Best, b: &Best) -> bool {
    match a.score.partial_cmp(&b.score) {
        Some(Ordering::Greater) => true,
        Some(Ordering::Less) => false,
        _ => match a.words.len().cmp(&b.words.len()) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => a.words < b.words,
        },
    }
}

fn best_split(s: &str, freq: &WordFreq) -> Vec<Range<usize>> {
    let bounds: Vec<usize> = s.char_indices().map(|(i, _)| i).chain(core::iter::once(s.len())).collect();
    let n = bounds.len() - 1;
    let mut best: Vec<Option<Best>> = alloc::vec![None; n + 1];
    best[0] = Some(Best { score: 0.0, words: Vec::new(), spans: Vec::new() });
    for end in 1..=n {
        let mut winner: Option<Best> = None;
        for start in 0..end {
            let Some(prefix) = &best[start] else { continue };
            let word = s[bounds[start]..bounds[end]].to_lowercase();
            let known = freq.contains(&word);
            // whole-run unknown words stay possible as the fallback
            if !known && end - start > MAX_KNOWN_WORD_CHARS && start != 0 {
                continue;
            }
            let mut cand = prefix.clone();
            cand.score += word_score(&word, freq);
            cand.words.push(word);
            cand.spans.push(bounds[start]..bounds[end]);
            if winner.as_ref().is_none_or(|w| better(&cand, w)) {
                winner = Some(cand);
            }
        }
        best[end] = winner;
    }
    best[n].take().map(|b| b.spans).unwrap_or_default()
}
