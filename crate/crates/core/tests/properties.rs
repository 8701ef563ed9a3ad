use proptest::prelude::*;
use pulsegauge_core::contextual::{polarity_score, ClassDistribution, ReferenceModel};
use pulsegauge_core::ensemble::{combine, label, EnsembleConfig, Label};
use pulsegauge_core::textprep::{
    emoji_to_text, is_emoji_char, is_protected_negation, segment_hashtag, strip_noise, word_score, EmojiTable,
    PrepProfile, Preprocessor, WordFreq,
};
use pulsegauge_core::vader::Vader;
use std::sync::LazyLock;

static VADER: LazyLock<Vader> = LazyLock::new(Vader::bundled);
static EMOJI: LazyLock<EmojiTable> = LazyLock::new(EmojiTable::bundled);
static PREP: LazyLock<Preprocessor> = LazyLock::new(Preprocessor::bundled);
static FREQ: LazyLock<WordFreq> = LazyLock::new(WordFreq::bundled);
static MODEL: LazyLock<ReferenceModel> = LazyLock::new(|| ReferenceModel::bundled().unwrap());

fn vocab() -> impl Strategy<Value = String> {
    prop::sample::select(vec![
        "good",
        "bad",
        "very",
        "not",
        "but",
        "love",
        "hate",
        "the",
        "service",
        "terrible",
        "great",
        "kind of",
        "!",
        "barely",
        "never",
        "okay",
        "awesome",
        "awful",
        "extremely",
        "is",
    ])
    .prop_map(String::from)
}

fn text() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop_oneof![
            vocab(),
            Just("😍".to_string()),
            Just("😡".to_string()),
            Just("https://t.co/x1".to_string()),
            Just("@someone".to_string()),
            Just("#BigNews".to_string()),
            Just(":)".to_string()),
            Just("LOVED".to_string()),
            "[a-zA-Z&%$*]{1,8}",
        ],
        0..12,
    )
    .prop_map(|w| w.join(" "))
}

proptest! {
    #[test]
    fn proportions_sum_to_one(tokens in prop::collection::vec(vocab(), 1..15), excl in 0usize..6) {
        let vader = &*VADER;
        let caps = vec![false; tokens.len()];
        let s = vader.score(&tokens, &caps, excl);
        prop_assert!((-1.0..=1.0).contains(&s.compound));
        let sum = s.pos + s.neg + s.neu;
        prop_assert!((sum - 1.0).abs() < 1e-9 || sum == 0.0, "sum {}", sum);
    }

    #[test]
    fn strip_noise_is_idempotent(t in text()) {
        let once = strip_noise(&t);
        prop_assert_eq!(strip_noise(&once), once);
    }

    #[test]
    fn emoji_to_text_leaves_no_emoji(t in text()) {
        let table = &*EMOJI;
        let out = emoji_to_text(&t, table);
        prop_assert!(out.chars().all(|c| !is_emoji_char(c)), "{}", out);
    }

    #[test]
    fn lexicon_profile_drops_stopwords(t in text()) {
        let prep = &*PREP;
        let seq = prep.preprocess(&t, &PrepProfile::VADER);
        let stop = &prep.resources().stopwords;
        for tok in &seq.tokens {
            prop_assert!(!tok.is_empty());
            prop_assert!(is_protected_negation(tok) || !stop.contains(tok), "{}", tok);
            prop_assert!(!tok.starts_with("http") && !tok.starts_with('@'), "{}", tok);
        }
        prop_assert_eq!(seq.tokens.len(), seq.caps.len());
    }

    #[test]
    fn segmentation_preserves_letters(w in "[a-zA-Z]{1,14}") {
        let wf = &*FREQ;
        let parts = segment_hashtag(&format!("#{w}"), wf);
        prop_assert_eq!(parts.concat(), w.to_lowercase());
    }

    #[test]
    fn segmentation_matches_exhaustive_split(w in "[aeinorst]{1,9}") {
        let wf = &*FREQ;
        let chars: Vec<char> = w.chars().collect();
        let mut best = f64::NEG_INFINITY;
        let mut optimal: Vec<Vec<String>> = Vec::new();
        for mask in 0u32..(1 << (chars.len() - 1)) {
            let mut words = Vec::new();
            let mut cur = String::new();
            for (i, c) in chars.iter().enumerate() {
                cur.push(*c);
                if i + 1 == chars.len() || mask & (1 << i) != 0 {
                    words.push(std::mem::take(&mut cur));
                }
            }
            let score: f64 = words.iter().map(|x| word_score(x, wf)).sum();
            if score > best + 1e-9 {
                best = score;
                optimal = vec![words];
            } else if (score - best).abs() <= 1e-9 {
                optimal.push(words);
            }
        }
        let got = segment_hashtag(&w, wf);
        let got_score: f64 = got.iter().map(|x| word_score(x, wf)).sum();
        prop_assert!((got_score - best).abs() < 1e-9, "{:?} scores {} < {}", got, got_score, best);
        if optimal.len() == 1 {
            prop_assert_eq!(&got, &optimal[0]);
        }
    }

    #[test]
    fn fusion_is_exact_and_monotone(v in 0.0f64..=1.0, c in 0.0f64..=1.0, a in 0.0f64..=1.0, d in 0.0f64..0.2) {
        let cfg = EnsembleConfig { alpha: a, ..EnsembleConfig::default() };
        let s = combine(v, c, &cfg).unwrap();
        prop_assert!((s - (a * v + (1.0 - a) * c)).abs() < 1e-12);
        prop_assert!(combine((v + d).min(1.0), c, &cfg).unwrap() >= s);
        prop_assert!(combine(v, (c + d).min(1.0), &cfg).unwrap() >= s);
        let up = label((s + d).min(1.0), &cfg);
        let rank = |l: Label| match l { Label::Negative => 0, Label::Neutral => 1, Label::Positive => 2 };
        prop_assert!(rank(up) >= rank(label(s, &cfg)));
    }

    #[test]
    fn polarity_respects_confident_classes(p in 0.0f64..=1.0, q in 0.0f64..=1.0) {
        let (p_pos, rest) = (p, 1.0 - p);
        let dist = ClassDistribution::new(p_pos, rest * q, 1.0 - p_pos - rest * q).unwrap();
        let s = polarity_score(&dist);
        prop_assert!((0.0..=1.0).contains(&s));
        if dist.argmax() == Label::Positive && dist.p_pos() > 0.6 {
            prop_assert!(s > 0.6);
        }
        if dist.argmax() == Label::Negative && dist.p_neg() > 0.6 {
            prop_assert!(s < 0.4);
        }
    }

    #[test]
    fn reference_model_is_deterministic(t in text()) {
        let model = &*MODEL;
        let a = model.predict(&t);
        prop_assert_eq!(a, model.predict(&t));
        let sum: f64 = a.to_array().iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-9);
    }
}

#[test]
fn reference_model_sanity_list() {
    let model = &*MODEL;
    let prep = &*PREP;
    let cases = [
        ("terrible awful", Label::Negative),
        ("the worst service, totally useless", Label::Negative),
        ("I hate this broken app", Label::Negative),
        ("amazing and wonderful support", Label::Positive),
        ("I love it, really great", Label::Positive),
        ("excellent fast delivery", Label::Positive),
        ("the company will hold its earnings call on thursday", Label::Neutral),
    ];
    for (text, want) in cases {
        let input = prep.preprocess(text, &PrepProfile::CONTEXTUAL).joined();
        assert_eq!(model.predict(&input).argmax(), want, "{text}");
    }
    assert_eq!(model.predict(""), ClassDistribution::uniform());
}
