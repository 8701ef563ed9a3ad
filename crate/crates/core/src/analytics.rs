//! Entity-level aggregation: the sentiment index, tiers, time series,
//! volatility and driver terms.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use chrono::{DateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};

use crate::ensemble::Label;
use crate::error::{Error, Result};
use crate::pipeline::SentimentRecord;
use crate::textprep::Stopwords;
use crate::vader::is_punctuation_token;

/// `100 · mean(scores)`.
pub fn csi(scores: &[f64]) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::EmptyWindow);
    }
    if let Some(&bad) = scores.iter().find(|s| !(0.0..=1.0).contains(*s)) {
        return Err(Error::InvalidScore(bad));
    }
    Ok(100.0 * scores.iter().sum::<f64>() / scores.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tier {
    Poor,
    Average,
    Good,
    Excellent,
}

impl Tier {
    pub fn as_str(self) -> &'static str {
        match self {
            Tier::Poor => "Poor",
            Tier::Average => "Average",
            Tier::Good => "Good",
            Tier::Excellent => "Excellent",
        }
    }
}

/// Poor below 27, Average below 35, Good below 40, Excellent from 40.
pub fn tier(csi: f64) -> Tier {
    if csi < 27.0 {
        Tier::Poor
    } else if csi < 35.0 {
        Tier::Average
    } else if csi < 40.0 {
        Tier::Good
    } else {
        Tier::Excellent
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCounts {
    pub positive: u64,
    pub neutral: u64,
    pub negative: u64,
}

impl LabelCounts {
    pub fn add(&mut self, label: Label) {
        match label {
            Label::Positive => self.positive += 1,
            Label::Neutral => self.neutral += 1,
            Label::Negative => self.negative += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.positive + self.neutral + self.negative
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub start: Option<DateTime<Utc>>,
    pub end: Option<DateTime<Utc>>,
}

impl Window {
    pub fn contains(&self, t: Option<DateTime<Utc>>) -> bool {
        match t {
            Some(t) => self.start.is_none_or(|s| t >= s) && self.end.is_none_or(|e| t <= e),
            None => self.start.is_none() && self.end.is_none(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntitySummary {
    pub entity: String,
    pub n: u64,
    pub csi: f64,
    pub tier: Tier,
    pub label_counts: LabelCounts,
    pub window: Window,
}

/// Summarizes the records whose event time falls in `window` (inclusive).
/// The reported window spans the observed event times.
pub fn summarize<'a>(
    entity: &str,
    records: impl IntoIterator<Item = &'a SentimentRecord>,
    window: &Window,
) -> Result<EntitySummary> {
    let mut scores = Vec::new();
    let mut counts = LabelCounts::default();
    let mut seen = Window::default();
    for r in records {
        let t = r.event_time();
        if !window.contains(t) {
            continue;
        }
        scores.push(r.s_final);
        counts.add(r.label);
        if let Some(t) = t {
            seen.start = Some(seen.start.map_or(t, |s| s.min(t)));
            seen.end = Some(seen.end.map_or(t, |e| e.max(t)));
        }
    }
    let value = csi(&scores)?;
    Ok(EntitySummary {
        entity: entity.to_string(),
        n: counts.total(),
        csi: value,
        tier: tier(value),
        label_counts: counts,
        window: seen,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub bucket_start: DateTime<Utc>,
    pub csi: f64,
    pub n: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentSeries {
    pub bucket_width_secs: i64,
    pub points: Vec<SeriesPoint>,
}

impl SentimentSeries {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bucket_start,csi,n\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{},{}", p.bucket_start.to_rfc3339(), p.csi, p.n);
        }
        out
    }
}

/// Parses `<n>s`, `<n>m`, `<n>h`, `<n>d`, `<n>w` or a bare number of seconds.
pub fn parse_bucket_width(spec: &str) -> Result<i64> {
    let spec = spec.trim();
    let (digits, unit) = match spec.char_indices().find(|(_, c)| !c.is_ascii_digit()) {
        Some((i, _)) => spec.split_at(i),
        None => (spec, "s"),
    };
    let n: i64 = digits.parse().map_err(|_| Error::InvalidInput(format!("bad bucket width `{spec}`")))?;
    let scale = match unit {
        "s" => 1,
        "m" => 60,
        "h" => 3600,
        "d" => 86_400,
        "w" => 7 * 86_400,
        _ => return Err(Error::InvalidInput(format!("bad bucket unit in `{spec}`"))),
    };
    match n.checked_mul(scale) {
        Some(w) if w > 0 => Ok(w),
        _ => Err(Error::InvalidInput(format!("bucket width must be positive, got `{spec}`"))),
    }
}

/// Buckets records by event time into epoch-aligned buckets of
/// `bucket_width_secs`; records without a time are skipped and empty buckets
/// are omitted.
pub fn series<'a>(
    records: impl IntoIterator<Item = &'a SentimentRecord>,
    bucket_width_secs: i64,
) -> Result<SentimentSeries> {
    if bucket_width_secs <= 0 {
        return Err(Error::InvalidInput("bucket width must be positive".into()));
    }
    let mut buckets: BTreeMap<i64, Vec<f64>> = BTreeMap::new();
    for r in records {
        if let Some(t) = r.event_time() {
            let start = t.timestamp().div_euclid(bucket_width_secs) * bucket_width_secs;
            buckets.entry(start).or_default().push(r.s_final);
        }
    }
    let points = buckets
        .into_iter()
        .map(|(start, scores)| {
            Ok(SeriesPoint {
                bucket_start: Utc
                    .timestamp_opt(start, 0)
                    .single()
                    .ok_or(Error::InvalidInput(format!("timestamp {start} out of range")))?,
                csi: csi(&scores)?,
                n: scores.len() as u64,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SentimentSeries { bucket_width_secs, points })
}

/// Population standard deviation of the bucket indices.
pub fn volatility(series: &SentimentSeries) -> Result<f64> {
    let n = series.points.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!("volatility needs at least 2 buckets, have {n}")));
    }
    let mean = series.points.iter().map(|p| p.csi).sum::<f64>() / n as f64;
    let var = series.points.iter().map(|p| (p.csi - mean) * (p.csi - mean)).sum::<f64>() / n as f64;
    Ok(libm::sqrt(var))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Driver {
    pub term: String,
    pub association: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriverReport {
    pub entity: String,
    pub positive_drivers: Vec<Driver>,
    pub negative_drivers: Vec<Driver>,
}

/// Add-one smoothed log-odds of each term between positive and negative
/// records. Neutral records, stopwords and punctuation tokens are ignored.
pub fn term_associations<'a>(
    records: impl IntoIterator<Item = &'a SentimentRecord>,
    stopwords: &Stopwords,
) -> Result<BTreeMap<String, f64>> {
    let mut pos: BTreeMap<&str, u64> = BTreeMap::new();
    let mut neg: BTreeMap<&str, u64> = BTreeMap::new();
    let (mut n_pos, mut n_neg) = (0u64, 0u64);
    let (mut docs_pos, mut docs_neg) = (0usize, 0usize);
    for r in records {
        let (counts, total, docs) = match r.label {
            Label::Positive => (&mut pos, &mut n_pos, &mut docs_pos),
            Label::Negative => (&mut neg, &mut n_neg, &mut docs_neg),
            Label::Neutral => continue,
        };
        *docs += 1;
        for t in &r.tokens {
            if is_punctuation_token(t) || stopwords.contains(t) {
                continue;
            }
            *counts.entry(t.as_str()).or_default() += 1;
            *total += 1;
        }
    }
    if docs_pos == 0 || docs_neg == 0 {
        return Err(Error::InsufficientData("drivers need at least one positive and one negative record".into()));
    }
    let mut vocab: Vec<&str> = pos.keys().chain(neg.keys()).copied().collect();
    vocab.sort_unstable();
    vocab.dedup();
    let v = vocab.len() as f64;
    Ok(vocab
        .into_iter()
        .map(|term| {
            let cp = pos.get(term).copied().unwrap_or(0) as f64;
            let cn = neg.get(term).copied().unwrap_or(0) as f64;
            let assoc = libm::log((cp + 1.0) / (n_pos as f64 + v)) - libm::log((cn + 1.0) / (n_neg as f64 + v));
            (term.to_string(), assoc)
        })
        .collect())
}

/// Top-`k` terms by association as positive drivers and bottom-`k` as
/// negative drivers; ties break on the term.
pub fn drivers<'a>(
    entity: &str,
    records: impl IntoIterator<Item = &'a SentimentRecord>,
    k: usize,
    stopwords: &Stopwords,
) -> Result<DriverReport> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let assoc = term_associations(records, stopwords)?;
    let mut ranked: Vec<Driver> = assoc.into_iter().map(|(term, association)| Driver { term, association }).collect();
    ranked.sort_by(|a, b| b.association.total_cmp(&a.association).then_with(|| a.term.cmp(&b.term)));
    let positive_drivers = ranked.iter().take(k).cloned().collect();
    ranked.sort_by(|a, b| a.association.total_cmp(&b.association).then_with(|| a.term.cmp(&b.term)));
    let negative_drivers = ranked.into_iter().take(k).collect();
    Ok(DriverReport { entity: entity.to_string(), positive_drivers, negative_drivers })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contextual::ClassDistribution;
    use crate::vader::VaderScores;
    use alloc::vec;

    pub(crate) fn record(id: &str, secs: i64, s: f64, label: Label, tokens: &[&str]) -> SentimentRecord {
        SentimentRecord {
            post_id: id.into(),
            entity: Some("acme".into()),
            created_at: Utc.timestamp_opt(secs, 0).single(),
            text: tokens.join(" "),
            tokens: tokens.iter().map(|t| t.to_string()).collect(),
            vader: VaderScores::default(),
            distribution: ClassDistribution::uniform(),
            s_vader: s,
            s_contextual: s,
            s_final: s,
            alpha: 0.4,
            label,
            generation: None,
            scored_at: None,
            latency_ms: None,
        }
    }

    #[test]
    fn csi_examples() {
        assert!((csi(&[0.812, 0.812]).unwrap() - 81.2).abs() < 1e-9);
        assert_eq!(csi(&[0.25]).unwrap(), 25.0);
        assert!(matches!(csi(&[]), Err(Error::EmptyWindow)));
        assert!(matches!(csi(&[1.2]), Err(Error::InvalidScore(_))));
    }

    #[test]
    fn tier_examples() {
        assert_eq!(tier(21.7), Tier::Poor);
        assert_eq!(tier(27.3), Tier::Average);
        assert_eq!(tier(40.0), Tier::Excellent);
        assert_eq!(tier(26.999), Tier::Poor);
        assert_eq!(tier(27.0), Tier::Average);
        assert_eq!(tier(35.0), Tier::Good);
        assert_eq!(tier(39.99), Tier::Good);
        assert_eq!(tier(44.3), Tier::Excellent);
        assert_eq!(tier(81.2), Tier::Excellent);
    }

    #[test]
    fn summary_counts_and_window() {
        let recs = vec![
            record("a", 100, 0.8, Label::Positive, &["good"]),
            record("b", 200, 0.2, Label::Negative, &["bad"]),
            record("c", 300, 0.5, Label::Neutral, &["meh"]),
        ];
        let s = summarize("acme", &recs, &Window::default()).unwrap();
        assert_eq!(s.n, 3);
        assert!((s.csi - 50.0).abs() < 1e-12);
        assert_eq!(s.label_counts.total(), s.n);
        assert_eq!(s.window.start.unwrap().timestamp(), 100);
        assert_eq!(s.window.end.unwrap().timestamp(), 300);
        let w = Window { start: Utc.timestamp_opt(150, 0).single(), end: None };
        let s = summarize("acme", &recs, &w).unwrap();
        assert_eq!(s.n, 2);
        let json = serde_json::to_value(&s).unwrap();
        for key in ["entity", "n", "csi", "tier", "label_counts", "window"] {
            assert!(json.get(key).is_some(), "{key}");
        }
        let late = Window { start: Utc.timestamp_opt(1000, 0).single(), end: None };
        assert!(matches!(summarize("acme", &recs, &late), Err(Error::EmptyWindow)));
    }

    #[test]
    fn series_examples() {
        assert!(series(&[], 3600).unwrap().points.is_empty());
        let recs = vec![
            record("a", 10, 0.2, Label::Negative, &[]),
            record("b", 20, 0.4, Label::Neutral, &[]),
            record("c", 3700, 0.9, Label::Positive, &[]),
        ];
        let s = series(&recs, 3600).unwrap();
        assert_eq!(s.points.len(), 2);
        assert!((s.points[0].csi - 30.0).abs() < 1e-9);
        assert_eq!(s.points[1].bucket_start.timestamp(), 3600);
        assert!((s.points[1].csi - 90.0).abs() < 1e-9);
        let one = series(&recs, 86_400).unwrap();
        assert_eq!(one.points.len(), 1);
        let total = csi(&[0.2, 0.4, 0.9]).unwrap();
        assert!((one.points[0].csi - total).abs() < 1e-9);
        assert!(s.to_csv().starts_with("bucket_start,csi,n\n1970-01-01T00:00:00+00:00,"));
    }

    #[test]
    fn bucket_width_parsing() {
        assert_eq!(parse_bucket_width("1h").unwrap(), 3600);
        assert_eq!(parse_bucket_width("15m").unwrap(), 900);
        assert_eq!(parse_bucket_width("2d").unwrap(), 172_800);
        assert_eq!(parse_bucket_width("30").unwrap(), 30);
        assert!(parse_bucket_width("0h").is_err());
        assert!(parse_bucket_width("h").is_err());
        assert!(parse_bucket_width("3y").is_err());
    }

    #[test]
    fn volatility_examples() {
        let mk = |vals: &[f64]| SentimentSeries {
            bucket_width_secs: 60,
            points: vals
                .iter()
                .enumerate()
                .map(|(i, &v)| SeriesPoint {
                    bucket_start: Utc.timestamp_opt(i as i64 * 60, 0).single().unwrap(),
                    csi: v,
                    n: 1,
                })
                .collect(),
        };
        assert_eq!(volatility(&mk(&[55.0, 55.0, 55.0])).unwrap(), 0.0);
        assert!((volatility(&mk(&[40.0, 60.0])).unwrap() - 10.0).abs() < 1e-12);
        assert!(matches!(volatility(&mk(&[40.0])), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn driver_signs() {
        let stop = Stopwords::bundled();
        let recs = vec![
            record("a", 1, 0.9, Label::Positive, &["delivery", "fast", "the"]),
            record("b", 2, 0.1, Label::Negative, &["delivery", "late", "!"]),
        ];
        let assoc = term_associations(&recs, &stop).unwrap();
        assert!(assoc["fast"] > 0.0);
        assert!(assoc["late"] < 0.0);
        assert!(assoc["delivery"].abs() < 1e-12);
        assert!(!assoc.contains_key("the"));
        assert!(!assoc.contains_key("!"));
        let rep = drivers("acme", &recs, 1, &stop).unwrap();
        assert_eq!(rep.positive_drivers[0].term, "fast");
        assert_eq!(rep.negative_drivers[0].term, "late");
        let only_pos = vec![recs[0].clone()];
        assert!(matches!(drivers("acme", &only_pos, 1, &stop), Err(Error::InsufficientData(_))));
    }
}
