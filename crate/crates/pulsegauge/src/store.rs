//! Append-only JSON Lines persistence with an in-memory index.
//!
//! Layout under the data directory:
//!
//! * `segments/<entity>.jsonl` holds one [`StoredRecord`] per line;
//! * `generations.jsonl` holds one [`Generation`] per ensemble config used.
//!
//! Every record carries a global sequence number. At startup all segments
//! are read back and merged by sequence, so the index after a restart is
//! the same as before it. A torn final line left by a crash mid-write is
//! cut off.

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, OpenOptions};
use std::hash::{DefaultHasher, Hasher};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use chrono::{DateTime, Utc};
use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use pulsegauge_core::ensemble::EnsembleConfig;
use pulsegauge_core::ingest::RawPost;
use pulsegauge_core::pipeline::SentimentRecord;
use serde::{Deserialize, Serialize};

use crate::error::{AppError, Result};

/// Author and engagement fields carried over from the collected post.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostMeta {
    pub author_id: String,
    pub author_created_at: DateTime<Utc>,
    pub author_post_count: u64,
    pub like_count: u64,
    pub reply_count: u64,
    pub is_retweet: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lang: Option<String>,
}

impl From<&RawPost> for PostMeta {
    fn from(p: &RawPost) -> Self {
        PostMeta {
            author_id: p.author_id.clone(),
            author_created_at: p.author_created_at,
            author_post_count: p.author_post_count,
            like_count: p.like_count,
            reply_count: p.reply_count,
            is_retweet: p.is_retweet,
            lang: p.lang_hint.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredRecord {
    pub seq: u64,
    #[serde(flatten)]
    pub record: SentimentRecord,
    #[serde(flatten)]
    pub meta: PostMeta,
}

impl StoredRecord {
    pub fn entity(&self) -> &str {
        self.record.entity.as_deref().unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Generation {
    pub generation: u64,
    pub alpha: f64,
    pub pos_threshold: f64,
    pub neg_threshold: f64,
}

impl Generation {
    pub fn config(&self) -> EnsembleConfig {
        EnsembleConfig { alpha: self.alpha, pos_threshold: self.pos_threshold, neg_threshold: self.neg_threshold }
    }
}

#[derive(Debug, Default)]
struct EntityIndex {
    records: Vec<Arc<StoredRecord>>,
    ids: HashSet<String>,
}

#[derive(Debug, Default)]
struct Inner {
    all: Vec<Arc<StoredRecord>>,
    entities: BTreeMap<String, EntityIndex>,
    generations: Vec<Generation>,
}

impl Inner {
    fn insert(&mut self, rec: Arc<StoredRecord>) {
        let idx = self.entities.entry(rec.entity().to_string()).or_default();
        idx.ids.insert(rec.record.post_id.clone());
        idx.records.push(rec.clone());
        self.all.push(rec);
    }

    fn next_seq(&self) -> u64 {
        self.all.last().map_or(1, |r| r.seq + 1)
    }
}

pub struct Store {
    dir: PathBuf,
    inner: RwLock<Inner>,
    writer: Mutex<()>,
}

const SEGMENT_NAME: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'_');

fn segment_file_name(entity: &str) -> String {
    format!("{}.jsonl", utf8_percent_encode(entity, SEGMENT_NAME))
}

/// Parses JSON Lines, cutting off an unterminated unparsable final line.
fn read_lines<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    let mut out = Vec::new();
    let mut offset = 0;
    for (i, line) in text.split_inclusive('\n').enumerate() {
        let complete = line.ends_with('\n');
        if !line.trim().is_empty() {
            match serde_json::from_str(line) {
                Ok(v) => out.push(v),
                Err(_) if !complete => {
                    let file = OpenOptions::new().write(true).open(path).map_err(|e| AppError::io(path, e))?;
                    file.set_len(offset as u64).map_err(|e| AppError::io(path, e))?;
                    break;
                }
                Err(e) => {
                    return Err(pulsegauge_core::Error::Parse {
                        source_name: path.display().to_string(),
                        line: i + 1,
                        message: e.to_string(),
                    }
                    .into())
                }
            }
        }
        offset += line.len();
    }
    Ok(out)
}

fn append_lines(path: &Path, lines: &str) -> Result<()> {
    let mut file = OpenOptions::new().create(true).append(true).open(path).map_err(|e| AppError::io(path, e))?;
    file.write_all(lines.as_bytes()).map_err(|e| AppError::io(path, e))?;
    file.sync_data().map_err(|e| AppError::io(path, e))
}

impl Store {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        let segments = dir.join("segments");
        fs::create_dir_all(&segments).map_err(|e| AppError::io(&segments, e))?;
        let mut inner = Inner::default();

        let gen_path = dir.join("generations.jsonl");
        if gen_path.exists() {
            inner.generations = read_lines(&gen_path)?;
        }

        let mut paths: Vec<PathBuf> = fs::read_dir(&segments)
            .map_err(|e| AppError::io(&segments, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
            .collect();
        paths.sort();
        let mut records: Vec<StoredRecord> = Vec::new();
        for p in &paths {
            records.extend(read_lines::<StoredRecord>(p)?);
        }
        records.sort_by_key(|r| r.seq);
        for r in records {
            inner.insert(Arc::new(r));
        }
        Ok(Store { dir, inner: RwLock::new(inner), writer: Mutex::new(()) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn read(&self) -> std::sync::RwLockReadGuard<'_, Inner> {
        self.inner.read().unwrap_or_else(|e| e.into_inner())
    }

    fn write(&self) -> std::sync::RwLockWriteGuard<'_, Inner> {
        self.inner.write().unwrap_or_else(|e| e.into_inner())
    }

    /// Generation tag for `cfg`, appending a new one when it differs from
    /// the latest.
    pub fn ensure_generation(&self, cfg: &EnsembleConfig) -> Result<Generation> {
        let _w = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(last) = self.read().generations.last() {
            if last.config() == *cfg {
                return Ok(*last);
            }
        }
        let gen = Generation {
            generation: self.read().generations.len() as u64 + 1,
            alpha: cfg.alpha,
            pos_threshold: cfg.pos_threshold,
            neg_threshold: cfg.neg_threshold,
        };
        let line = serde_json::to_string(&gen).expect("generation serializes") + "\n";
        append_lines(&self.dir.join("generations.jsonl"), &line)?;
        self.write().generations.push(gen);
        Ok(gen)
    }

    pub fn generations(&self) -> Vec<Generation> {
        self.read().generations.clone()
    }

    /// Appends the records whose post id is new for `entity`, in order, and
    /// returns what was written.
    pub fn append(
        &self,
        entity: &str,
        generation: u64,
        items: impl IntoIterator<Item = (RawPost, SentimentRecord)>,
    ) -> Result<Vec<Arc<StoredRecord>>> {
        self.append_notify(entity, generation, items, |_| {})
    }

    /// Like [`Store::append`], calling `notify` with the new records before
    /// the next append can start, so observers see persistence order.
    pub fn append_notify(
        &self,
        entity: &str,
        generation: u64,
        items: impl IntoIterator<Item = (RawPost, SentimentRecord)>,
        notify: impl FnOnce(&[Arc<StoredRecord>]),
    ) -> Result<Vec<Arc<StoredRecord>>> {
        let _w = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        let (mut seq, known) = {
            let inner = self.read();
            let known = inner.entities.get(entity).map(|e| e.ids.clone()).unwrap_or_default();
            (inner.next_seq(), known)
        };
        let mut fresh = Vec::new();
        let mut batch_ids = HashSet::new();
        let mut lines = String::new();
        for (post, mut record) in items {
            if known.contains(&record.post_id) || !batch_ids.insert(record.post_id.clone()) {
                continue;
            }
            record.entity = Some(entity.to_string());
            record.generation = Some(generation);
            let stored = StoredRecord { seq, record, meta: PostMeta::from(&post) };
            seq += 1;
            lines.push_str(&serde_json::to_string(&stored).expect("record serializes"));
            lines.push('\n');
            fresh.push(Arc::new(stored));
        }
        if fresh.is_empty() {
            return Ok(fresh);
        }
        append_lines(&self.dir.join("segments").join(segment_file_name(entity)), &lines)?;
        {
            let mut inner = self.write();
            for r in &fresh {
                inner.insert(r.clone());
            }
        }
        notify(&fresh);
        Ok(fresh)
    }

    /// `(entity, record count)` in name order.
    pub fn entities(&self) -> Vec<(String, usize)> {
        self.read().entities.iter().map(|(k, v)| (k.clone(), v.records.len())).collect()
    }

    pub fn records(&self, entity: &str) -> Option<Vec<Arc<StoredRecord>>> {
        self.read().entities.get(entity).map(|e| e.records.clone())
    }

    /// Records with sequence number greater than `cursor`, in order.
    pub fn since(&self, cursor: u64) -> Vec<Arc<StoredRecord>> {
        let inner = self.read();
        let start = inner.all.partition_point(|r| r.seq <= cursor);
        inner.all[start..].to_vec()
    }

    pub fn last_seq(&self) -> u64 {
        self.read().all.last().map_or(0, |r| r.seq)
    }

    pub fn len(&self) -> usize {
        self.read().all.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Hash over every file's name and bytes; changes iff the store does.
    pub fn digest(&self) -> Result<u64> {
        let _w = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        let mut files: Vec<PathBuf> = vec![self.dir.join("generations.jsonl")];
        let segments = self.dir.join("segments");
        files.extend(
            fs::read_dir(&segments).map_err(|e| AppError::io(&segments, e))?.filter_map(|e| e.ok().map(|e| e.path())),
        );
        files.sort();
        let mut h = DefaultHasher::new();
        for f in files {
            if let Ok(bytes) = fs::read(&f) {
                h.write(f.to_string_lossy().as_bytes());
                h.write(&bytes);
            }
        }
        Ok(h.finish())
    }
}
