use alloc::string::String;
use alloc::vec::Vec;

use super::noise::is_emoji_char;
use super::tables::EmojiTable;

/// Replaces every known emoji sequence by a space-delimited `:name:` token
/// (longest match first) and drops emoji codepoints the table does not know.
pub fn emoji_to_text(text: &str, table: &EmojiTable) -> String {
    let filtered: String = text.chars().filter(|&c| c != '\u{FE0F}').collect();
    let bounds: Vec<usize> = filtered.char_indices().map(|(i, _)| i).chain(core::iter::once(filtered.len())).collect();
    let chars = bounds.len() - 1;

    let mut out = String::with_capacity(filtered.len());
    let mut i = 0;
    while i < chars {
        let longest = table.max_chars().min(chars - i);
        let hit =
            (1..=longest).rev().find_map(|len| table.get(&filtered[bounds[i]..bounds[i + len]]).map(|n| (len, n)));
        if let Some((len, name)) = hit {
            out.push(' ');
            out.push_str(name);
            out.push(' ');
            i += len;
            continue;
        }
        let c = filtered[bounds[i]..].chars().next().unwrap_or(' ');
        if !is_emoji_char(c) {
            out.push(c);
        }
        i += 1;
    }
    let words: Vec<&str> = out.split_whitespace().collect();
    words.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let table = EmojiTable::bundled();
        assert_eq!(emoji_to_text("😍", &table), ":smiling_face_with_heart_eyes:");
        assert_eq!(emoji_to_text("abc", &table), "abc");
        assert_eq!(emoji_to_text("🙂🙂", &table), ":slightly_smiling_face: :slightly_smiling_face:");
    }

    #[test]
    fn sequences_and_unknowns() {
        let table = EmojiTable::bundled();
        // thumbs up with skin tone is one sequence
        assert_eq!(emoji_to_text("ok👍🏽", &table), "ok :thumbs_up_medium_skin_tone:");
        // red heart written with and without the variation selector
        assert_eq!(emoji_to_text("❤️", &table), emoji_to_text("❤", &table));
        let tiny = EmojiTable::parse("1F600\t:grinning_face:\n", "t").unwrap();
        assert_eq!(emoji_to_text("a😀b🦀c", &tiny), "a :grinning_face: bc");
    }
}
