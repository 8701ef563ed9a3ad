use alloc::string::String;
use alloc::vec::Vec;

use super::noise::KEPT_PUNCTUATION;
use super::tables::Abbreviations;

/// Splits `chunk` into (leading punctuation, core, trailing punctuation).
pub(crate) fn peel(chunk: &str) -> (&str, &str, &str) {
    let is_p = |c: char| KEPT_PUNCTUATION.contains(&c);
    let start = chunk.find(|c: char| !is_p(c)).unwrap_or(chunk.len());
    let end =
        chunk.rfind(|c: char| !is_p(c)).map_or(start, |i| i + chunk[i..].chars().next().map_or(0, char::len_utf8));
    (&chunk[..start], &chunk[start..end], &chunk[end..])
}

/// Whole-token, case-insensitive expansion; surrounding punctuation is kept.
pub fn expand_abbreviations(text: &str, table: &Abbreviations) -> String {
    let words: Vec<String> = text
        .split_whitespace()
        .map(|chunk| {
            let (lead, core, trail) = peel(chunk);
            match table.get(core) {
                Some(expansion) if !core.is_empty() => {
                    let mut w = String::from(lead);
                    w.push_str(expansion);
                    w.push_str(trail);
                    w
                }
                _ => String::from(chunk),
            }
        })
        .collect();
    words.join(" ")
}
