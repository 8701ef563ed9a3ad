//! Score fusion, label thresholds and the α grid search.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Neutral,
    Negative,
}

impl Label {
    /// Canonical class order used by confusion matrices and reports.
    pub const ALL: [Label; 3] = [Label::Positive, Label::Neutral, Label::Negative];

    pub fn index(self) -> usize {
        match self {
            Label::Positive => 0,
            Label::Neutral => 1,
            Label::Negative => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Positive => "positive",
            Label::Neutral => "neutral",
            Label::Negative => "negative",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positive" => Ok(Label::Positive),
            "neutral" => Ok(Label::Neutral),
            "negative" => Ok(Label::Negative),
            other => Err(Error::InvalidInput(format!("unknown label `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleConfig {
    pub alpha: f64,
    pub pos_threshold: f64,
    pub neg_threshold: f64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig { alpha: 0.4, pos_threshold: 0.6, neg_threshold: 0.4 }
    }
}

impl EnsembleConfig {
    pub fn with_alpha(alpha: f64) -> Result<Self> {
        let cfg = EnsembleConfig { alpha, ..Self::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidInput(format!("alpha {} outside [0, 1]", self.alpha)));
        }
        let ordered = 0.0 <= self.neg_threshold && self.neg_threshold < self.pos_threshold && self.pos_threshold <= 1.0;
        if !ordered {
            return Err(Error::InvalidInput(format!(
                "thresholds must satisfy 0 <= neg ({}) < pos ({}) <= 1",
                self.neg_threshold, self.pos_threshold
            )));
        }
        Ok(())
    }
}

fn check_unit(x: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(Error::InvalidScore(x))
    }
}

/// Maps a compound score from [-1, 1] onto [0, 1].
pub fn scale_vader(compound: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&compound) {
        return Err(Error::InvalidScore(compound));
    }
    Ok((compound + 1.0) / 2.0)
}

pub fn combine(s_vader: f64, s_contextual: f64, cfg: &EnsembleConfig) -> Result<f64> {
    let (v, c) = (check_unit(s_vader)?, check_unit(s_contextual)?);
    Ok((cfg.alpha * v + (1.0 - cfg.alpha) * c).clamp(0.0, 1.0))
}

/// Both thresholds are inclusive.
pub fn label(s_final: f64, cfg: &EnsembleConfig) -> Label {
    if s_final >= cfg.pos_threshold {
        Label::Positive
    } else if s_final <= cfg.neg_threshold {
        Label::Negative
    } else {
        Label::Neutral
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationExample {
    pub s_vader: f64,
    pub s_contextual: f64,
    pub gold: Label,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchResult {
    pub alpha: f64,
    pub macro_f1: f64,
    /// `(alpha, macro_f1)` for every grid point, ascending in alpha.
    pub curve: Vec<(f64, f64)>,
}

/// `{0, step, 2·step, ...}` up to 1, always ending in exactly 1.
pub fn alpha_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::InvalidInput(format!("step {step} outside (0, 0.5]")));
    }
    let mut grid = Vec::new();
    let mut i = 0u32;
    loop {
        let a = libm::round(f64::from(i) * step * 1e12) / 1e12;
        if a > 1.0 - 1e-9 {
            break;
        }
        grid.push(a);
        i += 1;
    }
    grid.push(1.0);
    Ok(grid)
}

pub fn macro_f1_at(validation: &[ValidationExample], base: &EnsembleConfig, alpha: f64) -> Result<f64> {
    let cfg = EnsembleConfig { alpha, ..*base };
    let mut golds = Vec::with_capacity(validation.len());
    let mut preds = Vec::with_capacity(validation.len());
    for ex in validation {
        golds.push(ex.gold);
        preds.push(label(combine(ex.s_vader, ex.s_contextual, &cfg)?, &cfg));
    }
    let m = evaluation::confusion(&golds, &preds)?;
    Ok(evaluation::metrics(&m)?.macro_f1)
}

/// Picks the α maximizing macro-F1; among equal scores the smallest α wins.
pub fn grid_search_alpha(
    validation: &[ValidationExample],
    step: f64,
    base: &EnsembleConfig,
) -> Result<GridSearchResult> {
    if validation.is_empty() {
        return Err(Error::EmptyValidation);
    }
    let mut curve = Vec::new();
    let mut best = (0.0, f64::NEG_INFINITY);
    for alpha in alpha_grid(step)? {
        let f1 = macro_f1_at(validation, base, alpha)?;
        if f1 > best.1 {
            best = (alpha, f1);
        }
        curve.push((alpha, f1));
    }
    Ok(GridSearchResult { alpha: best.0, macro_f1: best.1, curve })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scale_examples() {
        assert_eq!(scale_vader(0.0).unwrap(), 0.5);
        assert_eq!(scale_vader(1.0).unwrap(), 1.0);
        assert!((scale_vader(0.4404).unwrap() - 0.7202).abs() < 1e-12);
        assert!(matches!(scale_vader(1.2), Err(Error::InvalidScore(_))));
    }

    #[test]
    fn combine_examples() {
        let cfg = EnsembleConfig::default();
        assert!((combine(0.75, 0.50, &cfg).unwrap() - 0.60).abs() < 1e-12);
        assert_eq!(combine(0.3, 0.3, &cfg).unwrap(), 0.3);
        let vader_only = EnsembleConfig::with_alpha(1.0).unwrap();
        assert_eq!(combine(0.81, 0.2, &vader_only).unwrap(), 0.81);
        assert!(combine(1.5, 0.2, &cfg).is_err());
        assert!(combine(0.5, -0.1, &cfg).is_err());
    }

    #[test]
    fn label_thresholds_inclusive() {
        let cfg = EnsembleConfig::default();
        assert_eq!(label(0.60, &cfg), Label::Positive);
        assert_eq!(label(0.40, &cfg), Label::Negative);
        assert_eq!(label(0.5, &cfg), Label::Neutral);
    }

    #[test]
    fn config_validation() {
        assert!(EnsembleConfig::with_alpha(1.1).is_err());
        let bad = EnsembleConfig { pos_threshold: 0.4, neg_threshold: 0.4, ..EnsembleConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn grid_shape() {
        let g = alpha_grid(0.05).unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert_eq!(alpha_grid(0.3).unwrap(), [0.0, 0.3, 0.6, 0.9, 1.0]);
        assert_eq!(alpha_grid(0.1).unwrap()[3], 0.3);
        assert!(alpha_grid(0.0).is_err());
        assert!(alpha_grid(0.6).is_err());
    }

    #[test]
    fn grid_search_empty() {
        assert!(matches!(grid_search_alpha(&[], 0.05, &EnsembleConfig::default()), Err(Error::EmptyValidation)));
    }

    #[test]
    fn label_round_trip() {
        for l in Label::ALL {
            assert_eq!(l.as_str().parse::<Label>().unwrap(), l);
            assert_eq!(serde_json::to_string(&l).unwrap(), format!("\"{l}\""));
        }
    }
}
