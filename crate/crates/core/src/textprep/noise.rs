use alloc::string::String;
use alloc::vec::Vec;

/// Emoticons kept intact by noise removal and the tokenizer (matched
/// ASCII-case-insensitively against whole whitespace-delimited chunks).
pub const EMOTICONS: &[&str] = &[
    ":)", ":-)", ":(", ":-(", ":d", ":-d", ";)", ";-)", ":p", ":-p", ":/", ":-/", ":'(", ":')", ":o", ":-o", ":|",
    ":*", ":]", ":[", "=)", "=(", "=d", "<3", "</3", "^_^", "^^", "-_-", ">:(", ":3", "xd", ":s", ":$", "d:",
];

pub fn is_emoticon(chunk: &str) -> bool {
    EMOTICONS.iter().any(|e| e.eq_ignore_ascii_case(chunk))
}

/// Codepoints treated as emoji: pictographic blocks, dingbats, regional
/// indicators, skin-tone modifiers, joiners, keycap and variation selectors.
pub fn is_emoji_char(c: char) -> bool {
    matches!(
        c as u32,
        0x1F000..=0x1FAFF
            | 0x2600..=0x27BF
            | 0x2300..=0x23FF
            | 0x2B00..=0x2BFF
            | 0x2190..=0x21FF
            | 0x25A0..=0x25FF
            | 0x2900..=0x297F
            | 0x3030
            | 0x303D
            | 0x3297
            | 0x3299
            | 0x00A9
            | 0x00AE
            | 0x203C
            | 0x2049
            | 0x2122
            | 0x2139
            | 0x200D
            | 0x20E3
            | 0xFE0F
            | 0xE0020..=0xE007F
    )
}

/// Sentence punctuation that survives special-character filtering.
pub const KEPT_PUNCTUATION: &[char] = &['.', '!', '?', ',', '\'', '"'];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseOptions {
    pub urls: bool,
    pub mentions: bool,
    pub special: bool,
}

impl NoiseOptions {
    pub const ALL: NoiseOptions = NoiseOptions { urls: true, mentions: true, special: true };
}

/// Removes URLs, @mentions and special characters, then collapses whitespace.
///
/// Kept: alphanumerics, emoji codepoints, `.!?,'"`, `#`, and whole-chunk
/// emoticons such as `:)` or `<3`. Removed characters become spaces.
pub fn strip_noise(text: &str) -> String {
    strip_noise_with(text, NoiseOptions::ALL)
}

pub fn strip_noise_with(text: &str, opts: NoiseOptions) -> String {
    let mut pieces: Vec<String> = Vec::new();
    for chunk in text.split_whitespace() {
        let chunk: String = chunk
            .chars()
            .map(|c| match c {
                '\u{2018}' | '\u{2019}' => '\'',
                '\u{201C}' | '\u{201D}' => '"',
                other => other,
            })
            .collect();
        if is_emoticon(&chunk) {
            pieces.push(chunk);
            continue;
        }
        let mut s = chunk;
        if opts.mentions {
            s = remove_mentions(&s);
        }
        if opts.urls {
            s = remove_urls(&s);
        }
        if opts.special {
            s = s
                .chars()
                .map(|c| {
                    if c.is_alphanumeric() || is_emoji_char(c) || c == '#' || KEPT_PUNCTUATION.contains(&c) {
                        c
                    } else {
                        ' '
                    }
                })
                .collect();
        }
        pieces.extend(s.split_whitespace().map(String::from));
    }
    pieces.join(" ")
}

fn is_handle_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn remove_mentions(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '@' && chars.peek().is_some_and(|&n| is_handle_char(n)) {
            while chars.peek().is_some_and(|&n| is_handle_char(n)) {
                chars.next();
            }
            out.push(' ');
        } else {
            out.push(c);
        }
    }
    out
}

const URL_PREFIXES: &[&str] = &["http://", "https://", "www."];

/// URLs cannot contain whitespace, so everything from the first URL prefix
/// to the end of the chunk goes.
fn remove_urls(s: &str) -> String {
    let lower = s.to_ascii_lowercase();
    let cut = URL_PREFIXES.iter().filter_map(|p| lower.find(p)).min();
    match cut {
        Some(i) => String::from(&s[..i]),
        None => String::from(s),
    }
}
