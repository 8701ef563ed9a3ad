//! Lexicon and rule based sentiment engine.
//!
//! Each token takes its lexicon valence, adjusted by all-caps emphasis,
//! by booster words and negators up to three tokens back, and then by the
//! contrastive "but" rule. The adjusted sum plus an exclamation amplifier is
//! squashed into (-1, 1) as the compound score; pos/neg/neu are the
//! proportions of positive, negative and neutral mass.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::bundled;
use crate::error::{Error, Result};
use crate::textprep::TokenSequence;

pub const MAX_VALENCE: f64 = 4.0;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    entries: BTreeMap<String, f64>,
}

impl Lexicon {
    /// Parses `token<TAB>valence` lines. Later duplicates replace earlier ones.
    pub fn parse(src: &str, name: &str) -> Result<Self> {
        let mut lex = Lexicon::default();
        lex.merge_source(src, name)?;
        Ok(lex)
    }

    /// Merges another table over this one; its entries win.
    pub fn merge_source(&mut self, src: &str, name: &str) -> Result<()> {
        for (i, raw) in src.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            let token = cols.next().unwrap_or("").trim();
            let valence = cols.next().map(str::trim).unwrap_or("");
            if token.is_empty() || valence.is_empty() {
                return Err(Error::parse(name, i + 1, "expected `token<TAB>valence`"));
            }
            let valence: f64 = valence.parse().map_err(|_| Error::parse(name, i + 1, "valence is not a number"))?;
            if !valence.is_finite() || valence.abs() > MAX_VALENCE {
                return Err(Error::parse(name, i + 1, "valence outside [-4, 4]"));
            }
            self.entries.insert(token.to_lowercase(), valence);
        }
        Ok(())
    }

    /// Loads several tables in order (base, emoji valences, slang, ...).
    pub fn from_sources<'a>(sources: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let mut lex = Lexicon::default();
        for (src, name) in sources {
            lex.merge_source(src, name)?;
        }
        Ok(lex)
    }

    pub fn bundled() -> Self {
        Self::from_sources([
            (bundled::LEXICON, "lexicon.tsv"),
            (bundled::EMOJI_VALENCE, "emoji_valence.tsv"),
            (bundled::SLANG, "slang.tsv"),
        ])
        .expect("bundled lexicon tables parse")
    }

    pub fn insert(&mut self, token: &str, valence: f64) {
        self.entries.insert(token.to_lowercase(), valence.clamp(-MAX_VALENCE, MAX_VALENCE));
    }

    pub fn get(&self, token: &str) -> Option<f64> {
        self.entries.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.entries.contains_key(token)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(k, &v)| (k.as_str(), v))
    }
}

/// Rule constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VaderConfig {
    pub booster_step: f64,
    pub negation_scalar: f64,
    pub caps_step: f64,
    pub exclamation_step: f64,
    pub max_exclamations: usize,
    pub normalization_alpha: f64,
    pub but_before_weight: f64,
    pub but_after_weight: f64,
    /// Booster scaling at distance 1, 2, 3; its length is the lookback window.
    pub distance_scale: Vec<f64>,
}

impl Default for VaderConfig {
    fn default() -> Self {
        VaderConfig {
            booster_step: 0.293,
            negation_scalar: -0.74,
            caps_step: 0.733,
            exclamation_step: 0.292,
            max_exclamations: 4,
            normalization_alpha: 15.0,
            but_before_weight: 0.5,
            but_after_weight: 1.5,
            distance_scale: alloc::vec![1.0, 0.95, 0.9],
        }
    }
}

const NEGATORS: &[&str] = &[
    "ain't",
    "aint",
    "aren't",
    "arent",
    "can't",
    "cannot",
    "cant",
    "couldn't",
    "couldnt",
    "daren't",
    "darent",
    "despite",
    "didn't",
    "didnt",
    "doesn't",
    "doesnt",
    "don't",
    "dont",
    "hadn't",
    "hadnt",
    "hasn't",
    "hasnt",
    "haven't",
    "havent",
    "isn't",
    "isnt",
    "mightn't",
    "mightnt",
    "mustn't",
    "mustnt",
    "needn't",
    "neednt",
    "neither",
    "never",
    "none",
    "nope",
    "nor",
    "not",
    "nothing",
    "nowhere",
    "oughtn't",
    "oughtnt",
    "rarely",
    "seldom",
    "shan't",
    "shant",
    "shouldn't",
    "shouldnt",
    "uh-uh",
    "uhuh",
    "wasn't",
    "wasnt",
    "weren't",
    "werent",
    "without",
    "won't",
    "wont",
    "wouldn't",
    "wouldnt",
];

const BOOST_UP: &[&str] = &[
    "absolutely",
    "amazingly",
    "awfully",
    "completely",
    "considerable",
    "considerably",
    "decidedly",
    "deeply",
    "effing",
    "enormous",
    "enormously",
    "entirely",
    "especially",
    "exceptional",
    "exceptionally",
    "extreme",
    "extremely",
    "fabulously",
    "flippin",
    "flipping",
    "frackin",
    "fracking",
    "frickin",
    "fricking",
    "friggin",
    "frigging",
    "fuckin",
    "fucking",
    "fuggin",
    "fugging",
    "fully",
    "greatly",
    "hella",
    "highly",
    "hugely",
    "incredible",
    "incredibly",
    "intensely",
    "major",
    "majorly",
    "more",
    "most",
    "particularly",
    "purely",
    "quite",
    "really",
    "remarkably",
    "so",
    "substantially",
    "thoroughly",
    "total",
    "totally",
    "tremendous",
    "tremendously",
    "uber",
    "unbelievably",
    "unusually",
    "utter",
    "utterly",
    "very",
];

const BOOST_DOWN: &[&str] = &[
    "almost",
    "barely",
    "hardly",
    "kinda",
    "kindof",
    "kind-of",
    "less",
    "little",
    "marginal",
    "marginally",
    "occasional",
    "occasionally",
    "partly",
    "scarce",
    "scarcely",
    "slight",
    "slightly",
    "somewhat",
    "sorta",
    "sortof",
    "sort-of",
];

pub fn is_negator(token: &str) -> bool {
    NEGATORS.contains(&token) || token.contains("n't")
}

/// +1 for intensifiers, -1 for dampeners.
pub fn booster_direction(token: &str) -> Option<f64> {
    if BOOST_UP.contains(&token) {
        Some(1.0)
    } else if BOOST_DOWN.contains(&token) {
        Some(-1.0)
    } else {
        None
    }
}

/// Squashes an unbounded valence sum into (-1, 1): `s / sqrt(s^2 + alpha)`.
pub fn normalize_sum(sum: f64, alpha: f64) -> f64 {
    let score = sum / libm::sqrt(sum * sum + alpha);
    score.clamp(-1.0, 1.0)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct VaderScores {
    pub pos: f64,
    pub neg: f64,
    pub neu: f64,
    pub compound: f64,
}

/// Tokens made only of sentence punctuation; they carry no valence and
/// feed the exclamation amplifier instead.
pub fn is_punctuation_token(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| matches!(c, '.' | '!' | '?' | ',' | '\'' | '"'))
}

fn sign(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

#[derive(Debug, Clone)]
pub struct Vader {
    lexicon: Lexicon,
    config: VaderConfig,
}

impl Vader {
    pub fn new(lexicon: Lexicon, config: VaderConfig) -> Result<Self> {
        if lexicon.is_empty() {
            return Err(Error::LexiconMissing);
        }
        Ok(Vader { lexicon, config })
    }

    pub fn bundled() -> Self {
        Vader { lexicon: Lexicon::bundled(), config: VaderConfig::default() }
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn config(&self) -> &VaderConfig {
        &self.config
    }

    /// Per-token adjusted valences. `caps` marks emphasized tokens and may
    /// be shorter than `tokens` (missing entries read as false).
    pub fn token_valences<S: AsRef<str>>(&self, tokens: &[S], caps: &[bool]) -> Vec<f64> {
        let cfg = &self.config;
        let caps_at = |i: usize| caps.get(i).copied().unwrap_or(false);
        let mut out = Vec::with_capacity(tokens.len());
        for (i, token) in tokens.iter().enumerate() {
            let token = token.as_ref();
            let mut valence = match self.lexicon.get(token) {
                Some(v) if booster_direction(token).is_none() => v,
                _ => {
                    out.push(0.0);
                    continue;
                }
            };
            if valence != 0.0 && caps_at(i) {
                valence += cfg.caps_step * sign(valence);
            }
            for (d, scale) in cfg.distance_scale.iter().enumerate() {
                let Some(j) = i.checked_sub(d + 1) else { break };
                let prev = tokens[j].as_ref();
                if self.lexicon.contains(prev) {
                    continue;
                }
                if let Some(dir) = booster_direction(prev) {
                    if valence != 0.0 {
                        let mut step = cfg.booster_step * dir * sign(valence);
                        if caps_at(j) {
                            step += cfg.caps_step * sign(valence);
                        }
                        valence += step * scale;
                    }
                }
                if is_negator(prev) {
                    valence *= cfg.negation_scalar;
                }
            }
            out.push(valence);
        }
        out
    }

    /// Scores a token list. `exclamations` counts '!' in the text.
    pub fn score<S: AsRef<str>>(&self, tokens: &[S], caps: &[bool], exclamations: usize) -> VaderScores {
        if tokens.is_empty() {
            return VaderScores::default();
        }
        let cfg = &self.config;
        let mut valences = self.token_valences(tokens, caps);
        if let Some(but) = tokens.iter().position(|t| t.as_ref() == "but") {
            for (i, v) in valences.iter_mut().enumerate() {
                if i < but {
                    *v *= cfg.but_before_weight;
                } else if i > but {
                    *v *= cfg.but_after_weight;
                }
            }
        }

        let amplifier = exclamations.min(cfg.max_exclamations) as f64 * cfg.exclamation_step;
        let mut sum: f64 = valences.iter().sum();
        if sum > 0.0 {
            sum += amplifier;
        } else if sum < 0.0 {
            sum -= amplifier;
        }
        let compound = normalize_sum(sum, cfg.normalization_alpha);

        let mut pos_mass = 0.0;
        let mut neg_mass = 0.0;
        let mut neutral = 0.0;
        for &v in &valences {
            if v > 0.0 {
                pos_mass += v + 1.0;
            } else if v < 0.0 {
                neg_mass += v - 1.0;
            } else {
                neutral += 1.0;
            }
        }
        if pos_mass > -neg_mass {
            pos_mass += amplifier;
        } else if pos_mass < -neg_mass {
            neg_mass -= amplifier;
        }
        let total = pos_mass - neg_mass + neutral;
        VaderScores {
            pos: (pos_mass / total).abs(),
            neg: (neg_mass / total).abs(),
            neu: (neutral / total).abs(),
            compound,
        }
    }

    /// Drops punctuation tokens (counting their '!') and scores the rest.
    pub fn score_sequence(&self, seq: &TokenSequence) -> VaderScores {
        let mut words: Vec<&str> = Vec::with_capacity(seq.tokens.len());
        let mut caps = Vec::with_capacity(seq.tokens.len());
        let mut exclamations = 0;
        for (i, token) in seq.tokens.iter().enumerate() {
            if is_punctuation_token(token) {
                exclamations += token.chars().filter(|&c| c == '!').count();
            } else {
                words.push(token);
                caps.push(seq.caps.get(i).copied().unwrap_or(false));
            }
        }
        self.score(&words, &caps, exclamations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn valence_examples() {
        let v = Vader::bundled();
        assert_eq!(v.lexicon().get("good"), Some(1.9));
        assert_eq!(v.token_valences(&["good"], &[]), vec![1.9]);
        let neg = v.token_valences(&["not", "good"], &[]);
        assert_eq!(neg[0], 0.0);
        assert!(close(neg[1], 1.9 * -0.74));
        let boost = v.token_valences(&["very", "good"], &[]);
        assert_eq!(boost[0], 0.0);
        assert!(close(boost[1], 1.9 + 0.293));
    }

    #[test]
    fn boosters_scale_with_distance() {
        let v = Vader::bundled();
        // "phone" is not in the lexicon, so the booster two back still applies
        let vals = v.token_valences(&["very", "phone", "good"], &[]);
        assert!(close(vals[2], 1.9 + 0.293 * 0.95));
        let vals = v.token_valences(&["slightly", "bad"], &[]);
        assert!(close(vals[1], -2.5 + 0.293));
        let vals = v.token_valences(&["good"], &[true]);
        assert!(close(vals[0], 1.9 + 0.733));
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_sum(0.0, 15.0), 0.0);
        let expected = 1.9 / libm::sqrt(1.9 * 1.9 + 15.0);
        assert!((normalize_sum(1.9, 15.0) - 0.4404).abs() < 5e-5);
        assert_eq!(normalize_sum(1.9, 15.0), expected);
        assert_eq!(normalize_sum(-1.9, 15.0), -expected);
    }

    #[test]
    fn score_examples() {
        let v = Vader::bundled();
        assert_eq!(v.score::<&str>(&[], &[], 0), VaderScores::default());
        let good = v.score(&["good"], &[], 0);
        assert!((good.compound - 0.4404).abs() < 5e-5);
        assert!(good.pos > 0.0 && good.neg == 0.0);
        let mixed = v.score(&["good", "but", "bad"], &[], 0);
        assert!(mixed.compound < 0.0);
        let sum = 1.9 * 0.5 + -2.5 * 1.5;
        assert!(close(mixed.compound, normalize_sum(sum, 15.0)));
    }

    #[test]
    fn exclamations_amplify_toward_sign() {
        let v = Vader::bundled();
        let plain = v.score(&["good"], &[], 0).compound;
        let loud = v.score(&["good"], &[], 2).compound;
        let capped = v.score(&["good"], &[], 9).compound;
        assert!(close(loud, normalize_sum(1.9 + 2.0 * 0.292, 15.0)));
        assert!(close(capped, normalize_sum(1.9 + 4.0 * 0.292, 15.0)));
        assert!(loud > plain);
        assert_eq!(v.score(&["phone"], &[], 3).compound, 0.0);
    }

    #[test]
    fn lexicon_loading_and_overrides() {
        let base = Lexicon::parse(bundled::LEXICON, "lexicon.tsv").unwrap();
        assert_eq!(base.get("sick"), Some(-2.3));
        let mut merged = base.clone();
        merged.merge_source(":smiling_face_with_heart_eyes:\t2.9\n", "emoji").unwrap();
        merged.merge_source("sick\t1.5\n", "slang").unwrap();
        assert_eq!(merged.len(), base.len() + 1);
        assert_eq!(merged.get("sick"), Some(1.5));
        let v = Vader::new(merged, VaderConfig::default()).unwrap();
        assert!(v.score(&[":smiling_face_with_heart_eyes:"], &[], 0).compound > 0.5);
    }

    #[test]
    fn lexicon_errors() {
        let err = Lexicon::parse("good\t1.9\n# c\nbad\n", "lex").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert!(Lexicon::parse("x\t9.0\n", "lex").is_err());
        assert!(Lexicon::parse("x\tabc\n", "lex").is_err());
        assert_eq!(Vader::new(Lexicon::default(), VaderConfig::default()).unwrap_err(), Error::LexiconMissing);
    }

    #[test]
    fn proportions_sum_to_one() {
        let v = Vader::bundled();
        let s = v.score(&["good", "phone", "bad", "really", "great"], &[false, false, true], 2);
        assert!((s.pos + s.neg + s.neu - 1.0).abs() < 1e-9);
    }
}
