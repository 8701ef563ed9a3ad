use alloc::string::String;
use alloc::vec::Vec;

use super::abbrev::peel;
use super::noise::is_emoticon;
use super::tables::is_emoji_name;
use super::TokenSequence;

/// Whitespace tokenizer that keeps emoticons, `:name:` emoji tokens and
/// contractions whole, drops the `#` of hashtags, and peels leading or
/// trailing runs of sentence punctuation into their own tokens.
pub fn tokenize(text: &str) -> TokenSequence {
    let tokens = tokenize_words(text);
    TokenSequence { caps: alloc::vec![false; tokens.len()], tokens, source_text: String::from(text) }
}

pub(crate) fn tokenize_words(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        if is_emoticon(chunk) || is_emoji_name(chunk) {
            out.push(String::from(chunk));
            continue;
        }
        let chunk = chunk.trim_start_matches('#');
        let (lead, core, trail) = peel(chunk);
        for piece in [lead, core, trail] {
            if !piece.is_empty() {
                out.push(String::from(piece));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s).tokens
    }

    #[test]
    fn examples() {
        assert_eq!(toks("don't stop :)"), ["don't", "stop", ":)"]);
        assert!(toks("").is_empty());
        assert_eq!(toks("wow!!!"), ["wow", "!!!"]);
    }

    #[test]
    fn keeps_special_tokens() {
        assert_eq!(toks("<3 :smiling_face: \"yes\" #win! #"), ["<3", ":smiling_face:", "\"", "yes", "\"", "win", "!"]);
        assert_eq!(toks("...really?"), ["...", "really", "?"]);
    }
}
