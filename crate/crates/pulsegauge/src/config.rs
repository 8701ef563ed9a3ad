//! Settings from the TOML config file and `PG_*` environment variables.
//!
//! Precedence, lowest first: built-in defaults, config file, environment,
//! command-line flags (applied by the caller).

use std::fs;
use std::path::{Path, PathBuf};

use pulsegauge_core::bundled;
use pulsegauge_core::contextual::BackendDescriptor;
use pulsegauge_core::ensemble::EnsembleConfig;
use pulsegauge_core::ingest::FilterPolicy;
use pulsegauge_core::textprep::{Abbreviations, EmojiTable, Stopwords, WordFreq};
use pulsegauge_core::textprep::{Preprocessor, Resources};
use pulsegauge_core::vader::{Lexicon, Vader, VaderConfig};
use serde::Deserialize;

use crate::error::{AppError, Result};
use crate::source::SourceSpec;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub alpha: Option<f64>,
    pub pos_threshold: Option<f64>,
    pub neg_threshold: Option<f64>,
    pub min_engagement: Option<u64>,
    pub backend: Option<String>,
    pub source: Option<String>,
    pub resources: Option<PathBuf>,
}

impl ConfigFile {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        toml::from_str(&text).map_err(|e| AppError::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub ensemble: EnsembleConfig,
    pub policy: FilterPolicy,
    pub backend: BackendDescriptor,
    pub source: Option<SourceSpec>,
    pub resources: Option<PathBuf>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            ensemble: EnsembleConfig::default(),
            policy: FilterPolicy::default(),
            backend: BackendDescriptor::bundled_reference(),
            source: None,
            resources: None,
        }
    }
}

fn parse_env<T: std::str::FromStr>(name: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| AppError::Config(format!("{name}: cannot parse `{value}`")))
}

impl Settings {
    /// `env` looks up variables; pass `|k| std::env::var(k).ok()` in production.
    pub fn load(config: Option<&Path>, env: impl Fn(&str) -> Option<String>) -> Result<Self> {
        let file = match config {
            Some(path) => ConfigFile::read(path)?,
            None => ConfigFile::default(),
        };
        let mut s = Settings::default();
        if let Some(a) = file.alpha {
            s.ensemble.alpha = a;
        }
        if let Some(p) = file.pos_threshold {
            s.ensemble.pos_threshold = p;
        }
        if let Some(n) = file.neg_threshold {
            s.ensemble.neg_threshold = n;
        }
        if let Some(m) = file.min_engagement {
            s.policy.min_engagement = m;
        }
        if let Some(b) = &file.backend {
            s.backend = BackendDescriptor::parse(b)?;
        }
        if let Some(src) = &file.source {
            s.source = Some(src.parse()?);
        }
        s.resources = file.resources;

        if let Some(v) = env("PG_ALPHA") {
            s.ensemble.alpha = parse_env("PG_ALPHA", &v)?;
        }
        if let Some(v) = env("PG_MIN_ENGAGEMENT") {
            s.policy.min_engagement = parse_env("PG_MIN_ENGAGEMENT", &v)?;
        }
        if let Some(v) = env("PG_BACKEND") {
            s.backend = BackendDescriptor::parse(&v)?;
        }
        if let Some(v) = env("PG_SOURCE") {
            s.source = Some(v.parse()?);
        }
        s.ensemble.validate()?;
        s.policy.validate()?;
        Ok(s)
    }

    pub fn from_env(config: Option<&Path>) -> Result<Self> {
        Self::load(config, |k| std::env::var(k).ok().filter(|v| !v.is_empty()))
    }
}

/// Tables loaded from `dir` where present, bundled copies otherwise.
///
/// Recognized files: `stopwords.txt`, `abbreviations.tsv`, `emoji.tsv`,
/// `wordfreq.tsv`, `lexicon.tsv`, `emoji_valence.tsv`, `slang.tsv`.
pub fn load_tables(dir: Option<&Path>) -> Result<(Preprocessor, Vader)> {
    let Some(dir) = dir else {
        return Ok((Preprocessor::bundled(), Vader::bundled()));
    };
    let read = |name: &str, fallback: &'static str| -> Result<String> {
        let path = dir.join(name);
        match fs::read_to_string(&path) {
            Ok(text) => Ok(text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(fallback.to_string()),
            Err(e) => Err(AppError::io(path, e)),
        }
    };
    let resources = Resources {
        stopwords: Stopwords::parse(&read("stopwords.txt", bundled::STOPWORDS)?)?,
        abbreviations: Abbreviations::parse(&read("abbreviations.tsv", bundled::ABBREVIATIONS)?, "abbreviations.tsv")?,
        emoji: EmojiTable::parse(&read("emoji.tsv", bundled::EMOJI)?, "emoji.tsv")?,
        wordfreq: WordFreq::parse(&read("wordfreq.tsv", bundled::WORDFREQ)?, "wordfreq.tsv")?,
    };
    let lexicon = read("lexicon.tsv", bundled::LEXICON)?;
    let emoji_valence = read("emoji_valence.tsv", bundled::EMOJI_VALENCE)?;
    let slang = read("slang.tsv", bundled::SLANG)?;
    let lexicon = Lexicon::from_sources([
        (lexicon.as_str(), "lexicon.tsv"),
        (emoji_valence.as_str(), "emoji_valence.tsv"),
        (slang.as_str(), "slang.tsv"),
    ])?;
    Ok((Preprocessor::new(resources), Vader::new(lexicon, VaderConfig::default())?))
}
