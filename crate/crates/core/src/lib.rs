//! Scoring core for the pulsegauge sentiment pipeline.
//!
//! Everything in this crate is allocation-only (`#![no_std]` + `alloc`):
//! post filtering, text normalization, the lexicon engine, the contextual
//! classifier contract with its hashed bag-of-words reference model, score
//! fusion, entity analytics and classification metrics. File formats,
//! sources, persistence and serving live in the `pulsegauge` crate.
//!
//! The usual entry point is [`pipeline::HybridScorer`], which chains
//! [`textprep`], [`vader`], [`contextual`] and [`ensemble`]:
//!
//! ```
//! use pulsegauge_core::ensemble::EnsembleConfig;
//! use pulsegauge_core::pipeline::HybridScorer;
//!
//! let scorer = HybridScorer::bundled(EnsembleConfig::default()).unwrap();
//! let scored = scorer.score_text("I love this phone").unwrap();
//! assert!(scored.s_final > 0.5);
//! ```
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytics;
pub mod bundled;
pub mod contextual;
pub mod ensemble;
pub mod error;
pub mod evaluation;
pub mod ingest;
pub mod pipeline;
pub mod textprep;
pub mod vader;

pub use error::{Error, Result};
