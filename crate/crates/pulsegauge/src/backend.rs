//! Contextual classifier backends that need the standard library: model
//! files on disk and the remote `/classify` client.

use std::fs;
use std::time::Duration;

use pulsegauge_core::contextual::wire::{self, ClassifyRequest};
use pulsegauge_core::contextual::{
    BackendDescriptor, BackendKind, ClassDistribution, Classifier, FixtureClassifier, ReferenceModel,
};
use pulsegauge_core::{Error, Result};

#[derive(Debug, Clone)]
pub struct RemoteConfig {
    /// Base URL; requests go to `<endpoint>/classify`.
    pub endpoint: String,
    pub timeout: Duration,
    pub retries: u32,
    pub max_batch: usize,
    pub max_in_flight: usize,
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        RemoteConfig {
            endpoint: endpoint.into(),
            timeout: Duration::from_secs(5),
            retries: 2,
            max_batch: 32,
            max_in_flight: 4,
        }
    }

    fn url(&self) -> String {
        format!("{}/classify", self.endpoint.trim_end_matches('/'))
    }
}

pub struct RemoteClassifier {
    config: RemoteConfig,
    agent: ureq::Agent,
}

impl RemoteClassifier {
    pub fn new(config: RemoteConfig) -> Result<Self> {
        if config.max_batch == 0 || config.max_in_flight == 0 {
            return Err(Error::InvalidInput("batch size and in-flight limit must be positive".into()));
        }
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .new_agent();
        Ok(RemoteClassifier { config, agent })
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.config
    }

    /// Sends one request; `offset` shifts reported item indices.
    fn post_chunk(&self, texts: &[&str], offset: usize) -> Result<Vec<ClassDistribution>> {
        let request = ClassifyRequest { texts: texts.iter().map(|t| t.to_string()).collect() };
        let url = self.config.url();
        let mut last = String::new();
        for attempt in 0..=self.config.retries {
            if attempt > 0 {
                std::thread::sleep(Duration::from_millis(50 * u64::from(attempt)));
            }
            let mut resp = match self.agent.post(&url).send_json(&request) {
                Ok(resp) => resp,
                Err(e) => {
                    last = e.to_string();
                    continue;
                }
            };
            let status = resp.status().as_u16();
            if status >= 500 || status == 429 {
                last = format!("HTTP {status}");
                continue;
            }
            if status >= 400 {
                return Err(Error::BackendUnavailable(format!("{url}: HTTP {status}")));
            }
            let body = match resp.body_mut().read_to_string() {
                Ok(body) => body,
                Err(e) => {
                    last = e.to_string();
                    continue;
                }
            };
            return wire::decode_response(&body, texts.len()).map_err(|e| match e {
                Error::MalformedResponse { index, message } => {
                    Error::MalformedResponse { index: index.map(|i| i + offset), message }
                }
                other => other,
            });
        }
        Err(Error::BackendUnavailable(format!("{url}: {last} (after {} attempts)", self.config.retries + 1)))
    }
}

impl Classifier for RemoteClassifier {
    fn name(&self) -> &str {
        "remote"
    }

    fn classify(&self, text: &str) -> Result<ClassDistribution> {
        Ok(self.post_chunk(&[text], 0)?.remove(0))
    }

    /// Splits into batches of at most `max_batch`, keeps at most
    /// `max_in_flight` requests open, and returns results in input order.
    fn classify_batch(&self, texts: &[&str]) -> Result<Vec<ClassDistribution>> {
        let chunks: Vec<(usize, &[&str])> =
            texts.chunks(self.config.max_batch).enumerate().map(|(i, c)| (i * self.config.max_batch, c)).collect();
        let mut out = Vec::with_capacity(texts.len());
        for wave in chunks.chunks(self.config.max_in_flight) {
            let results: Vec<Result<Vec<ClassDistribution>>> = std::thread::scope(|s| {
                let handles: Vec<_> =
                    wave.iter().map(|&(offset, chunk)| s.spawn(move || self.post_chunk(chunk, offset))).collect();
                handles.into_iter().map(|h| h.join().expect("classifier request thread panicked")).collect()
            });
            for r in results {
                out.extend(r?);
            }
        }
        Ok(out)
    }
}

/// Builds the classifier a descriptor names.
pub fn build_classifier(desc: &BackendDescriptor) -> Result<Box<dyn Classifier>> {
    desc.validate()?;
    let read = |path: &str| fs::read_to_string(path).map_err(|e| Error::ModelLoad(format!("{path}: {e}")));
    match desc.kind {
        BackendKind::Reference => match desc.model_path.as_deref() {
            Some(BackendDescriptor::BUNDLED_MODEL) | None => Ok(Box::new(ReferenceModel::bundled()?)),
            Some(path) => Ok(Box::new(ReferenceModel::from_json(&read(path)?)?)),
        },
        BackendKind::Fixture => {
            let path = desc.model_path.as_deref().unwrap_or_default();
            Ok(Box::new(FixtureClassifier::parse(&read(path)?, path)?))
        }
        BackendKind::Remote => {
            let endpoint = desc.endpoint.clone().unwrap_or_default();
            Ok(Box::new(RemoteClassifier::new(RemoteConfig::new(endpoint))?))
        }
    }
}
