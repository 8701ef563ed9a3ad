//! Scoring collected posts into records, optionally across threads.

use std::thread;

use chrono::{DateTime, Utc};

use pulsegauge_core::ingest::RawPost;
use pulsegauge_core::pipeline::{HybridScorer, SentimentRecord};
use pulsegauge_core::textprep::TokenSequence;
use pulsegauge_core::Result;

/// A post plus, optionally, its lexicon-profile tokens and contextual-profile
/// text from an earlier `preprocess` stage.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreInput {
    pub post_id: String,
    pub text: String,
    pub created_at: Option<DateTime<Utc>>,
    pub entity: Option<String>,
    pub prepared: Option<(TokenSequence, String)>,
}

impl ScoreInput {
    pub fn from_post(post: &RawPost, entity: Option<&str>) -> Self {
        ScoreInput {
            post_id: post.id.clone(),
            text: post.text.clone(),
            created_at: Some(post.created_at),
            entity: entity.map(String::from),
            prepared: None,
        }
    }
}

fn score_chunk(scorer: &HybridScorer, chunk: &[ScoreInput]) -> Result<Vec<SentimentRecord>> {
    let prepared = chunk
        .iter()
        .map(|i| match &i.prepared {
            Some(p) => p.clone(),
            None => (scorer.vader_tokens(&i.text), scorer.contextual_text(&i.text)),
        })
        .collect();
    let scored = scorer.score_prepared_batch(prepared)?;
    Ok(chunk
        .iter()
        .zip(scored)
        .map(|(input, s)| {
            let mut rec = SentimentRecord::from_scored(&input.post_id, &input.text, &s, scorer.config());
            rec.entity = input.entity.clone();
            rec.created_at = input.created_at;
            rec
        })
        .collect())
}

/// Scores `inputs` in order. With `jobs > 1` the input is split into
/// contiguous chunks scored on separate threads; output order is unchanged.
pub fn score_inputs(scorer: &HybridScorer, inputs: &[ScoreInput], jobs: usize) -> Result<Vec<SentimentRecord>> {
    let jobs = jobs.max(1);
    if jobs == 1 || inputs.len() < 2 {
        return score_chunk(scorer, inputs);
    }
    let size = inputs.len().div_ceil(jobs);
    let parts: Vec<Result<Vec<SentimentRecord>>> = thread::scope(|s| {
        let handles: Vec<_> = inputs.chunks(size).map(|c| s.spawn(move || score_chunk(scorer, c))).collect();
        handles.into_iter().map(|h| h.join().expect("scoring thread panicked")).collect()
    });
    let mut out = Vec::with_capacity(inputs.len());
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

pub fn score_posts(scorer: &HybridScorer, posts: &[RawPost], entity: Option<&str>) -> Result<Vec<SentimentRecord>> {
    let inputs: Vec<ScoreInput> = posts.iter().map(|p| ScoreInput::from_post(p, entity)).collect();
    score_inputs(scorer, &inputs, 1)
}
