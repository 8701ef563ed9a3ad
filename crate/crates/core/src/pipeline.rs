//! End-to-end hybrid scoring of a single post.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::contextual::{polarity_score, ClassDistribution, Classifier, ReferenceModel};
use crate::ensemble::{self, EnsembleConfig, Label};
use crate::error::Result;
use crate::textprep::{PrepProfile, Preprocessor, TokenSequence};
use crate::vader::{Vader, VaderScores};

/// Everything computed for one text.
#[derive(Debug, Clone, PartialEq)]
pub struct Scored {
    pub vader_tokens: TokenSequence,
    pub contextual_text: String,
    pub vader: VaderScores,
    pub distribution: ClassDistribution,
    pub s_vader: f64,
    pub s_contextual: f64,
    pub s_final: f64,
    pub label: Label,
}

/// A persisted per-post scoring result. `s_final` can be recomputed from
/// `s_vader`, `s_contextual` and `alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentRecord {
    pub post_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entity: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_at: Option<DateTime<Utc>>,
    pub text: String,
    pub tokens: Vec<String>,
    pub vader: VaderScores,
    pub distribution: ClassDistribution,
    pub s_vader: f64,
    pub s_contextual: f64,
    pub s_final: f64,
    pub alpha: f64,
    pub label: Label,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generation: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scored_at: Option<DateTime<Utc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latency_ms: Option<f64>,
}

impl SentimentRecord {
    pub fn from_scored(
        post_id: impl Into<String>,
        text: impl Into<String>,
        scored: &Scored,
        cfg: &EnsembleConfig,
    ) -> Self {
        SentimentRecord {
            post_id: post_id.into(),
            entity: None,
            created_at: None,
            text: text.into(),
            tokens: scored.vader_tokens.tokens.clone(),
            vader: scored.vader,
            distribution: scored.distribution,
            s_vader: scored.s_vader,
            s_contextual: scored.s_contextual,
            s_final: scored.s_final,
            alpha: cfg.alpha,
            label: scored.label,
            generation: None,
            scored_at: None,
            latency_ms: None,
        }
    }

    /// Event time used for windows and series: creation time when known,
    /// otherwise scoring time.
    pub fn event_time(&self) -> Option<DateTime<Utc>> {
        self.created_at.or(self.scored_at)
    }

    /// Re-fuses the stored component scores under `cfg`.
    pub fn rescored(&self, cfg: &EnsembleConfig) -> Result<(f64, Label)> {
        let s = ensemble::combine(self.s_vader, self.s_contextual, cfg)?;
        Ok((s, ensemble::label(s, cfg)))
    }
}

/// Preprocessing, both component models and the fusion step.
pub struct HybridScorer {
    prep: Preprocessor,
    vader: Vader,
    classifier: Box<dyn Classifier>,
    config: EnsembleConfig,
}

impl HybridScorer {
    pub fn new(
        prep: Preprocessor,
        vader: Vader,
        classifier: Box<dyn Classifier>,
        config: EnsembleConfig,
    ) -> Result<Self> {
        config.validate()?;
        Ok(HybridScorer { prep, vader, classifier, config })
    }

    /// Bundled tables and the bundled reference model.
    pub fn bundled(config: EnsembleConfig) -> Result<Self> {
        Self::new(Preprocessor::bundled(), Vader::bundled(), Box::new(ReferenceModel::bundled()?), config)
    }

    pub fn config(&self) -> &EnsembleConfig {
        &self.config
    }

    pub fn preprocessor(&self) -> &Preprocessor {
        &self.prep
    }

    pub fn vader(&self) -> &Vader {
        &self.vader
    }

    pub fn classifier(&self) -> &dyn Classifier {
        self.classifier.as_ref()
    }

    pub fn vader_tokens(&self, text: &str) -> TokenSequence {
        self.prep.preprocess(text, &PrepProfile::VADER)
    }

    pub fn contextual_text(&self, text: &str) -> String {
        self.prep.preprocess(text, &PrepProfile::CONTEXTUAL).joined()
    }

    pub fn score_vader(&self, text: &str) -> Result<(TokenSequence, VaderScores, f64)> {
        let tokens = self.vader_tokens(text);
        let scores = self.vader.score_sequence(&tokens);
        let s = ensemble::scale_vader(scores.compound)?;
        Ok((tokens, scores, s))
    }

    pub fn score_contextual(&self, text: &str) -> Result<(String, ClassDistribution, f64)> {
        let prepared = self.contextual_text(text);
        let dist = self.classifier.classify(&prepared)?;
        Ok((prepared, dist, polarity_score(&dist)))
    }

    pub fn score_text(&self, text: &str) -> Result<Scored> {
        let (vader_tokens, vader, s_vader) = self.score_vader(text)?;
        let (contextual_text, distribution, s_contextual) = self.score_contextual(text)?;
        self.fuse(vader_tokens, vader, s_vader, contextual_text, distribution, s_contextual)
    }

    /// Scores many texts, sending the contextual half as one batch.
    pub fn score_batch(&self, texts: &[&str]) -> Result<Vec<Scored>> {
        let prepared = texts.iter().map(|t| (self.vader_tokens(t), self.contextual_text(t))).collect();
        self.score_prepared_batch(prepared)
    }

    /// Scores already preprocessed inputs: the lexicon-profile token
    /// sequence and the contextual-profile text of each post.
    pub fn score_prepared_batch(&self, prepared: Vec<(TokenSequence, String)>) -> Result<Vec<Scored>> {
        let refs: Vec<&str> = prepared.iter().map(|(_, c)| c.as_str()).collect();
        let dists = self.classifier.classify_batch(&refs)?;
        if dists.len() != prepared.len() {
            return Err(crate::Error::MalformedResponse {
                index: None,
                message: alloc::format!("expected {} distributions, got {}", prepared.len(), dists.len()),
            });
        }
        prepared
            .into_iter()
            .zip(dists)
            .map(|((tokens, ctx), dist)| {
                let vader = self.vader.score_sequence(&tokens);
                let s_vader = ensemble::scale_vader(vader.compound)?;
                self.fuse(tokens, vader, s_vader, ctx, dist, polarity_score(&dist))
            })
            .collect()
    }

    fn fuse(
        &self,
        vader_tokens: TokenSequence,
        vader: VaderScores,
        s_vader: f64,
        contextual_text: String,
        distribution: ClassDistribution,
        s_contextual: f64,
    ) -> Result<Scored> {
        let s_final = ensemble::combine(s_vader, s_contextual, &self.config)?;
        Ok(Scored {
            vader_tokens,
            contextual_text,
            vader,
            distribution,
            s_vader,
            s_contextual,
            s_final,
            label: ensemble::label(s_final, &self.config),
        })
    }

    pub fn score_record(&self, post_id: &str, text: &str) -> Result<SentimentRecord> {
        let scored = self.score_text(text)?;
        Ok(SentimentRecord::from_scored(post_id, text, &scored, &self.config))
    }
}
