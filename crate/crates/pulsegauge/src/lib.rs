//! Runtime half of pulsegauge: post sources, the remote classifier client,
//! configuration, the JSON Lines record store, the HTTP/SSE service and the
//! command-line interface. Scoring itself lives in `pulsegauge-core`.

pub mod backend;
pub mod bench;
pub mod cli;
pub mod config;
pub mod error;
pub mod scoring;
pub mod service;
pub mod source;
pub mod store;

pub use error::{AppError, Result};
