//! Post model and the collection filters: query formatting, language and
//! bot heuristics, engagement threshold, and the capped collection loop.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use chrono::{DateTime, Days, NaiveDate, NaiveTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One collected post with the author and engagement metadata the filters test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawPost {
    pub id: String,
    pub created_at: DateTime<Utc>,
    pub text: String,
    pub author_id: String,
    pub author_created_at: DateTime<Utc>,
    pub author_post_count: u64,
    pub like_count: u64,
    pub reply_count: u64,
    pub is_retweet: bool,
    #[serde(rename = "lang", default, skip_serializing_if = "Option::is_none")]
    pub lang_hint: Option<String>,
}

impl RawPost {
    pub fn engagement(&self) -> u64 {
        self.like_count.saturating_add(self.reply_count)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollectionRequest {
    query: String,
    max_items: u32,
    start_date: NaiveDate,
    end_date: NaiveDate,
}

impl CollectionRequest {
    pub fn new(query: impl Into<String>, max_items: u32, start_date: NaiveDate, end_date: NaiveDate) -> Result<Self> {
        let req = CollectionRequest { query: query.into(), max_items, start_date, end_date };
        req.validate()?;
        Ok(req)
    }

    /// Re-checks the invariants; used after deserializing untrusted input.
    pub fn validate(&self) -> Result<()> {
        if self.query.trim().is_empty() {
            return Err(Error::InvalidRequest("query must be non-empty".into()));
        }
        if self.max_items == 0 {
            return Err(Error::InvalidRequest("max_items must be at least 1".into()));
        }
        if self.start_date > self.end_date {
            return Err(Error::InvalidRequest(format!(
                "start_date {} is after end_date {}",
                self.start_date, self.end_date
            )));
        }
        Ok(())
    }

    pub fn query(&self) -> &str {
        &self.query
    }

    pub fn max_items(&self) -> u32 {
        self.max_items
    }

    pub fn start_date(&self) -> NaiveDate {
        self.start_date
    }

    pub fn end_date(&self) -> NaiveDate {
        self.end_date
    }

    /// Half-open instant range `[start 00:00, end + 1 day 00:00)` covering both dates.
    pub fn window(&self) -> (DateTime<Utc>, DateTime<Utc>) {
        let start = self.start_date.and_time(NaiveTime::MIN).and_utc();
        let end =
            self.end_date.checked_add_days(Days::new(1)).unwrap_or(NaiveDate::MAX).and_time(NaiveTime::MIN).and_utc();
        (start, end)
    }

    pub fn contains(&self, at: DateTime<Utc>) -> bool {
        let (start, end) = self.window();
        start <= at && at < end
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterPolicy {
    pub min_engagement: u64,
    pub english_only: bool,
    pub exclude_retweets: bool,
    pub bot_posts_per_day_max: f64,
}

impl Default for FilterPolicy {
    fn default() -> Self {
        FilterPolicy { min_engagement: 5, english_only: true, exclude_retweets: true, bot_posts_per_day_max: 50.0 }
    }
}

impl FilterPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.bot_posts_per_day_max.is_finite() && self.bot_posts_per_day_max > 0.0) {
            return Err(Error::InvalidRequest("bot_posts_per_day_max must be a positive number".into()));
        }
        Ok(())
    }
}

/// `<query> since:<YYYY-MM-DD> until:<YYYY-MM-DD>`
pub fn format_query(req: &CollectionRequest) -> Result<String> {
    req.validate()?;
    Ok(format!(
        "{} since:{} until:{}",
        req.query.trim(),
        req.start_date.format("%Y-%m-%d"),
        req.end_date.format("%Y-%m-%d")
    ))
}

const SECONDS_PER_DAY: f64 = 86_400.0;

/// Lifetime posting rate above `max_posts_per_day`, with account age floored at one day.
pub fn is_bot_like(
    author_created_at: DateTime<Utc>,
    author_post_count: u64,
    now: DateTime<Utc>,
    max_posts_per_day: f64,
) -> bool {
    let age_days = ((now - author_created_at).num_seconds() as f64 / SECONDS_PER_DAY).max(1.0);
    author_post_count as f64 / age_days > max_posts_per_day
}

/// Minimum share of English function words for the fallback classifier.
pub const ENGLISH_FUNCTION_WORD_RATIO: f64 = 0.12;

const ENGLISH_FUNCTION_WORDS: &[&str] = &[
    "a", "about", "after", "all", "also", "am", "an", "and", "any", "are", "as", "at", "be", "because", "been", "but",
    "by", "can", "could", "did", "do", "does", "for", "from", "get", "had", "has", "have", "he", "her", "here", "him",
    "his", "how", "i", "if", "in", "into", "is", "it", "its", "just", "me", "my", "no", "not", "now", "of", "on",
    "one", "or", "our", "out", "she", "so", "some", "than", "that", "the", "their", "them", "then", "there", "these",
    "they", "this", "to", "up", "us", "very", "was", "we", "were", "what", "when", "which", "who", "why", "will",
    "with", "would", "you", "your",
];

/// Returns the hint when present, otherwise `"en"` if enough tokens are English
/// function words and `"und"` if not.
pub fn detect_language(text: &str, lang_hint: Option<&str>) -> Result<String> {
    if text.trim().is_empty() {
        return Err(Error::InvalidInput("cannot detect language of empty text".into()));
    }
    if let Some(hint) = lang_hint.map(str::trim).filter(|h| !h.is_empty()) {
        return Ok(hint.to_string());
    }
    let mut total = 0usize;
    let mut hits = 0usize;
    for word in text.split_whitespace() {
        let word: String = word.trim_matches(|c: char| !c.is_alphanumeric() && c != '\'').to_lowercase();
        if word.is_empty() || word.starts_with("http") || word.starts_with('@') {
            continue;
        }
        total += 1;
        if ENGLISH_FUNCTION_WORDS.binary_search(&word.as_str()).is_ok() {
            hits += 1;
        }
    }
    if total > 0 && hits as f64 / total as f64 >= ENGLISH_FUNCTION_WORD_RATIO {
        Ok("en".to_string())
    } else {
        Ok("und".to_string())
    }
}

fn is_english(code: &str) -> bool {
    code.eq_ignore_ascii_case("en") || code.len() > 3 && code[..3].eq_ignore_ascii_case("en-")
}

/// Conjunction of every enabled filter; `now` is the instant the author
/// metadata describes.
pub fn passes_filters(post: &RawPost, policy: &FilterPolicy, now: DateTime<Utc>) -> bool {
    if policy.exclude_retweets && post.is_retweet {
        return false;
    }
    if post.engagement() < policy.min_engagement {
        return false;
    }
    if is_bot_like(post.author_created_at, post.author_post_count, now, policy.bot_posts_per_day_max) {
        return false;
    }
    if policy.english_only {
        match detect_language(&post.text, post.lang_hint.as_deref()) {
            Ok(code) if is_english(&code) => {}
            _ => return false,
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq)]
pub struct Collection {
    pub posts: Vec<RawPost>,
    /// Set when the source failed before exhaustion or the cap.
    pub truncated: bool,
    pub error: Option<Error>,
    /// Items pulled from the source, including rejected ones.
    pub scanned: usize,
}

/// Pulls posts from `source` in order, keeping the first occurrence of each
/// id that falls inside the request window and passes `policy`, until the
/// source is exhausted or `max_items` posts are kept.
///
/// Bot rates are evaluated as of each post's own `created_at`, so replaying
/// the same source is deterministic.
pub fn collect<I>(source: I, req: &CollectionRequest, policy: &FilterPolicy) -> Collection
where
    I: IntoIterator<Item = Result<RawPost>>,
{
    let cap = req.max_items() as usize;
    let mut seen = BTreeSet::new();
    let mut out = Collection { posts: Vec::new(), truncated: false, error: None, scanned: 0 };
    for item in source {
        let post = match item {
            Ok(post) => post,
            Err(err) => {
                out.truncated = true;
                out.error = Some(err);
                break;
            }
        };
        out.scanned += 1;
        if post.id.is_empty() || !req.contains(post.created_at) {
            continue;
        }
        if !seen.insert(post.id.clone()) {
            continue;
        }
        if passes_filters(&post, policy, post.created_at) {
            out.posts.push(post);
            if out.posts.len() >= cap {
                break;
            }
        }
    }
    out
}
