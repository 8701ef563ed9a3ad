//! Post sources: JSON Lines replay files and a paginated HTTP adapter.

use std::collections::VecDeque;
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use percent_encoding::{utf8_percent_encode, NON_ALPHANUMERIC};
use pulsegauge_core::ingest::RawPost;
use pulsegauge_core::{Error, Result};
use serde::{Deserialize, Serialize};

/// `file:<path>` or `live:<url>`, as accepted by `PG_SOURCE`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SourceSpec {
    File(PathBuf),
    Live(String),
}

impl FromStr for SourceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some(("file", path)) if !path.is_empty() => Ok(SourceSpec::File(PathBuf::from(path))),
            Some(("live", url)) if !url.is_empty() => Ok(SourceSpec::Live(url.to_string())),
            _ => Err(Error::InvalidInput(format!("source must be `file:<path>` or `live:<url>`, got `{s}`"))),
        }
    }
}

impl TryFrom<String> for SourceSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SourceSpec> for String {
    fn from(s: SourceSpec) -> Self {
        match s {
            SourceSpec::File(p) => format!("file:{}", p.display()),
            SourceSpec::Live(u) => format!("live:{u}"),
        }
    }
}

pub type PostStream = Box<dyn Iterator<Item = Result<RawPost>> + Send>;

impl SourceSpec {
    /// Opens the source; `query` is the formatted collection query.
    pub fn open(&self, query: &str) -> Result<PostStream> {
        match self {
            SourceSpec::File(path) => Ok(Box::new(FileSource::open(path)?)),
            SourceSpec::Live(url) => Ok(Box::new(LiveSource::new(LiveConfig::new(url.clone()), query))),
        }
    }
}

/// Reads one `RawPost` per line, skipping blank lines.
pub struct FileSource {
    lines: io::Lines<Box<dyn BufRead + Send>>,
    name: String,
    line: usize,
    failed: bool,
}

impl FileSource {
    pub fn open(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::SourceUnavailable(format!("{}: {e}", path.display())))?;
        Ok(Self::from_reader(BufReader::new(file), path.display().to_string()))
    }

    pub fn from_reader(reader: impl BufRead + Send + 'static, name: impl Into<String>) -> Self {
        let reader: Box<dyn BufRead + Send> = Box::new(reader);
        FileSource { lines: reader.lines(), name: name.into(), line: 0, failed: false }
    }
}

impl Iterator for FileSource {
    type Item = Result<RawPost>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            self.line += 1;
            let line = match self.lines.next()? {
                Ok(line) => line,
                Err(e) => {
                    self.failed = true;
                    return Some(Err(Error::SourceUnavailable(format!("{}: {e}", self.name))));
                }
            };
            if line.trim().is_empty() {
                continue;
            }
            return Some(serde_json::from_str(&line).map_err(|e| {
                self.failed = true;
                Error::Parse { source_name: self.name.clone(), line: self.line, message: e.to_string() }
            }));
        }
    }
}

/// Retry schedule: the n-th retry waits `base · factor^(n-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Backoff {
    pub base: Duration,
    pub factor: u32,
    pub max_attempts: u32,
}

impl Default for Backoff {
    fn default() -> Self {
        Backoff { base: Duration::from_secs(1), factor: 2, max_attempts: 5 }
    }
}

impl Backoff {
    pub fn delay(&self, retry: u32) -> Duration {
        self.base * self.factor.saturating_pow(retry.saturating_sub(1))
    }
}

/// One page of provider results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Page {
    pub posts: Vec<RawPost>,
    #[serde(default)]
    pub next_cursor: Option<String>,
}

/// Maps a provider response body onto a [`Page`].
pub type ResponseAdapter = fn(&str) -> Result<Page>;

pub fn json_page(body: &str) -> Result<Page> {
    serde_json::from_str(body).map_err(|e| Error::Parse {
        source_name: "live response".into(),
        line: 1,
        message: e.to_string(),
    })
}

#[derive(Debug, Clone)]
pub struct LiveConfig {
    /// Request URL; `{query}` and `{cursor}` are replaced by the
    /// percent-encoded query and page cursor.
    pub url_template: String,
    pub backoff: Backoff,
    pub timeout: Duration,
    pub adapter: ResponseAdapter,
}

impl LiveConfig {
    /// Appends `q` and `cursor` parameters to `base_url`.
    pub fn new(base_url: impl Into<String>) -> Self {
        let base = base_url.into();
        let sep = if base.contains('?') { '&' } else { '?' };
        LiveConfig {
            url_template: format!("{base}{sep}q={{query}}&cursor={{cursor}}"),
            backoff: Backoff::default(),
            timeout: Duration::from_secs(10),
            adapter: json_page,
        }
    }

    pub fn url(&self, query: &str, cursor: Option<&str>) -> String {
        let enc = |s: &str| utf8_percent_encode(s, NON_ALPHANUMERIC).to_string();
        self.url_template.replace("{query}", &enc(query)).replace("{cursor}", &enc(cursor.unwrap_or("")))
    }
}

enum Fetch {
    Retry(String),
    Fatal(Error),
}

/// Follows `next_cursor` until the provider stops returning one.
pub struct LiveSource {
    config: LiveConfig,
    agent: ureq::Agent,
    query: String,
    cursor: Option<String>,
    buffer: VecDeque<RawPost>,
    done: bool,
    attempts: u32,
}

impl LiveSource {
    pub fn new(config: LiveConfig, query: &str) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .new_agent();
        LiveSource {
            config,
            agent,
            query: query.to_string(),
            cursor: None,
            buffer: VecDeque::new(),
            done: false,
            attempts: 0,
        }
    }

    /// Total HTTP attempts made so far, retries included.
    pub fn attempts(&self) -> u32 {
        self.attempts
    }

    fn fetch_once(&mut self) -> std::result::Result<Page, Fetch> {
        self.attempts += 1;
        let url = self.config.url(&self.query, self.cursor.as_deref());
        let mut resp = self.agent.get(&url).call().map_err(|e| Fetch::Retry(e.to_string()))?;
        let status = resp.status().as_u16();
        if status == 429 || status >= 500 {
            return Err(Fetch::Retry(format!("HTTP {status}")));
        }
        if status >= 400 {
            return Err(Fetch::Fatal(Error::SourceUnavailable(format!("{url}: HTTP {status}"))));
        }
        let body = resp.body_mut().read_to_string().map_err(|e| Fetch::Retry(e.to_string()))?;
        (self.config.adapter)(&body).map_err(Fetch::Fatal)
    }

    fn fetch_page(&mut self) -> Result<Page> {
        let backoff = self.config.backoff;
        let mut last = String::new();
        for attempt in 1..=backoff.max_attempts.max(1) {
            if attempt > 1 {
                std::thread::sleep(backoff.delay(attempt - 1));
            }
            match self.fetch_once() {
                Ok(page) => return Ok(page),
                Err(Fetch::Fatal(e)) => return Err(e),
                Err(Fetch::Retry(msg)) => last = msg,
            }
        }
        Err(Error::SourceUnavailable(format!("giving up after {} attempts: {last}", backoff.max_attempts)))
    }
}

impl Iterator for LiveSource {
    type Item = Result<RawPost>;

    fn next(&mut self) -> Option<Self::Item> {
        while self.buffer.is_empty() {
            if self.done {
                return None;
            }
            match self.fetch_page() {
                Ok(page) => {
                    self.buffer.extend(page.posts);
                    self.cursor = page.next_cursor.filter(|c| !c.is_empty());
                    self.done = self.cursor.is_none();
                }
                Err(e) => {
                    self.done = true;
                    return Some(Err(e));
                }
            }
        }
        self.buffer.pop_front().map(Ok)
    }
}
