//! Confusion matrices, classification metrics and model comparison.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::ensemble::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub text: String,
    pub gold: Label,
}

/// JSON Lines of `{"text": ..., "gold": "positive|neutral|negative"}`.
pub fn parse_dataset(src: &str, name: &str) -> Result<Vec<LabeledExample>> {
    src.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::parse(name, i + 1, e.to_string())))
        .collect()
}

/// Counts indexed `[gold][pred]` in the order positive, neutral, negative.
pub type Confusion = [[u64; 3]; 3];

pub fn confusion(golds: &[Label], preds: &[Label]) -> Result<Confusion> {
    if golds.len() != preds.len() {
        return Err(Error::LengthMismatch { golds: golds.len(), preds: preds.len() });
    }
    if golds.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut m = [[0u64; 3]; 3];
    for (g, p) in golds.iter().zip(preds) {
        m[g.index()][p.index()] += 1;
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n: u64,
    pub accuracy: f64,
    pub macro_f1: f64,
    pub per_class: PerClass,
    pub confusion: Confusion,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mean_latency_ms: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerClass {
    pub positive: ClassMetrics,
    pub neutral: ClassMetrics,
    pub negative: ClassMetrics,
}

impl PerClass {
    pub fn get(&self, label: Label) -> &ClassMetrics {
        match label {
            Label::Positive => &self.positive,
            Label::Neutral => &self.neutral,
            Label::Negative => &self.negative,
        }
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Zero denominators yield 0 rather than NaN.
pub fn metrics(m: &Confusion) -> Result<EvalReport> {
    let n: u64 = m.iter().flatten().sum();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let class = |c: usize| {
        let row: u64 = m[c].iter().sum();
        let col: u64 = m.iter().map(|r| r[c]).sum();
        let precision = ratio(m[c][c], col);
        let recall = ratio(m[c][c], row);
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        ClassMetrics { precision, recall, f1, support: row }
    };
    let per_class = PerClass { positive: class(0), neutral: class(1), negative: class(2) };
    let trace: u64 = (0..3).map(|c| m[c][c]).sum();
    Ok(EvalReport {
        n,
        accuracy: ratio(trace, n),
        macro_f1: (per_class.positive.f1 + per_class.neutral.f1 + per_class.negative.f1) / 3.0,
        per_class,
        confusion: *m,
        mean_latency_ms: None,
    })
}

pub fn evaluate(golds: &[Label], preds: &[Label]) -> Result<EvalReport> {
    metrics(&confusion(golds, preds)?)
}

/// Anything that labels a text.
pub trait Scorer {
    fn predict(&self, text: &str) -> Result<Label>;
}

impl<F: Fn(&str) -> Result<Label>> Scorer for F {
    fn predict(&self, text: &str) -> Result<Label> {
        self(text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub model: String,
    #[serde(flatten)]
    pub report: EvalReport,
}

/// Evaluates each model on the same example order. Errors carry the model
/// name.
pub fn compare(models: &[(&str, &dyn Scorer)], dataset: &[LabeledExample]) -> Result<Vec<ModelReport>> {
    if dataset.is_empty() {
        return Err(Error::EmptyInput);
    }
    if models.is_empty() {
        return Err(Error::InvalidInput("no models to compare".into()));
    }
    let golds: Vec<Label> = dataset.iter().map(|e| e.gold).collect();
    models
        .iter()
        .map(|(name, scorer)| {
            let preds = dataset
                .iter()
                .map(|e| scorer.predict(&e.text))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Model { model: name.to_string(), message: e.to_string() })?;
            Ok(ModelReport { model: name.to_string(), report: evaluate(&golds, &preds)? })
        })
        .collect()
}

/// Aligned-column comparison table.
pub fn render_table(reports: &[ModelReport]) -> String {
    let width = reports.iter().map(|r| r.model.len()).max().unwrap_or(0).max(5);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:>8}  {:>8}  {:>7}  {:>7}  {:>7}  {:>12}",
        "model", "accuracy", "macro_f1", "f1_pos", "f1_neu", "f1_neg", "latency_ms"
    );
    for r in reports {
        let p = &r.report.per_class;
        let latency = r.report.mean_latency_ms.map(|l| format!("{l:.3}")).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            out,
            "{:<width$}  {:>8.4}  {:>8.4}  {:>7.4}  {:>7.4}  {:>7.4}  {:>12}",
            r.model, r.report.accuracy, r.report.macro_f1, p.positive.f1, p.neutral.f1, p.negative.f1, latency
        );
    }
    out
}
