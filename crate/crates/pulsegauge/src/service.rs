//! HTTP + server-sent-events service over the record store.
//!
//! Jobs run the collect, score and persist pipeline on a bounded worker
//! pool. Every persisted record is broadcast to `/stream` subscribers in
//! sequence order; the SSE `id:` of each event is the record's sequence
//! number and doubles as the resume cursor.

use std::collections::{BTreeMap, VecDeque};
use std::convert::Infallible;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, NaiveDate, NaiveTime, Utc};
use futures::stream;
use pulsegauge_core::analytics::{self, DriverReport, EntitySummary, SentimentSeries, Window};
use pulsegauge_core::ensemble::EnsembleConfig;
use pulsegauge_core::ingest::{self, CollectionRequest, FilterPolicy};
use pulsegauge_core::pipeline::{HybridScorer, SentimentRecord};
use pulsegauge_core::Error as CoreError;
use serde::{Deserialize, Serialize};
use tokio::sync::{broadcast, mpsc};

use crate::error::{AppError, ErrorBody, Result};
use crate::scoring::score_posts;
use crate::source::{PostStream, SourceSpec};
use crate::store::{Generation, Store, StoredRecord};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Jobs pending or running at once; further submissions get `queue_full`.
    pub queue_capacity: usize,
    pub workers: usize,
    pub heartbeat: Duration,
    /// Events buffered per stream subscriber before it is dropped.
    pub subscriber_buffer: usize,
    pub default_source: Option<SourceSpec>,
    pub default_policy: FilterPolicy,
    /// Posts scored and persisted per step within a job.
    pub chunk_size: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            queue_capacity: 16,
            workers: 4,
            heartbeat: Duration::from_secs(15),
            subscriber_buffer: 1024,
            default_source: None,
            default_policy: FilterPolicy::default(),
            chunk_size: 32,
        }
    }
}

/// Opens a source for a job given its formatted query.
pub type SourceOpener = Arc<dyn Fn(&SourceSpec, &str) -> pulsegauge_core::Result<PostStream> + Send + Sync>;

pub fn default_opener() -> SourceOpener {
    Arc::new(|spec: &SourceSpec, query: &str| spec.open(query))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobStatus {
    Pending,
    Running,
    Done,
    Failed,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobCounts {
    pub collected: u64,
    pub scored: u64,
}

/// Body of `POST /jobs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSubmission {
    pub entity: String,
    pub request: CollectionRequest,
    #[serde(default)]
    pub policy: Option<FilterPolicy>,
    #[serde(default)]
    pub source: Option<SourceSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobView {
    pub id: u64,
    pub entity: String,
    pub request: CollectionRequest,
    pub policy: FilterPolicy,
    pub source: SourceSpec,
    pub status: JobStatus,
    pub counts: JobCounts,
    pub generation: u64,
    #[serde(default)]
    pub truncated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorBody>,
}

pub struct AppState {
    store: Arc<Store>,
    scorer: Arc<HybridScorer>,
    config: ServiceConfig,
    generation: Generation,
    jobs: Mutex<BTreeMap<u64, JobView>>,
    active: AtomicUsize,
    queue: mpsc::UnboundedSender<u64>,
    events: broadcast::Sender<Arc<StoredRecord>>,
    opener: SourceOpener,
}

fn lock<T>(m: &Mutex<T>) -> std::sync::MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|e| e.into_inner())
}

impl AppState {
    /// Builds the state and starts the worker pool on the current tokio
    /// runtime.
    pub fn start(
        store: Arc<Store>,
        scorer: Arc<HybridScorer>,
        config: ServiceConfig,
        opener: SourceOpener,
    ) -> Result<Arc<Self>> {
        let generation = store.ensure_generation(scorer.config())?;
        let (tx, rx) = mpsc::unbounded_channel();
        let (events, _) = broadcast::channel(config.subscriber_buffer.max(1));
        let state = Arc::new(AppState {
            store,
            scorer,
            config,
            generation,
            jobs: Mutex::new(BTreeMap::new()),
            active: AtomicUsize::new(0),
            queue: tx,
            events,
            opener,
        });
        let rx = Arc::new(tokio::sync::Mutex::new(rx));
        for _ in 0..state.config.workers {
            let (state, rx) = (state.clone(), rx.clone());
            tokio::spawn(async move {
                loop {
                    let Some(id) = rx.lock().await.recv().await else { break };
                    let st = state.clone();
                    let _ = tokio::task::spawn_blocking(move || st.run_job(id)).await;
                    state.active.fetch_sub(1, Ordering::SeqCst);
                }
            });
        }
        Ok(state)
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn ensemble(&self) -> &EnsembleConfig {
        self.scorer.config()
    }

    pub fn submit(&self, sub: JobSubmission) -> Result<JobView> {
        if sub.entity.trim().is_empty() {
            return Err(CoreError::InvalidRequest("entity must be non-empty".into()).into());
        }
        sub.request.validate()?;
        let policy = sub.policy.unwrap_or_else(|| self.config.default_policy.clone());
        policy.validate()?;
        let source = sub
            .source
            .or_else(|| self.config.default_source.clone())
            .ok_or_else(|| CoreError::InvalidRequest("no source given and no default configured".into()))?;

        let cap = self.config.queue_capacity;
        self.active
            .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |n| (n < cap).then_some(n + 1))
            .map_err(AppError::QueueFull)?;

        let view = {
            let mut jobs = lock(&self.jobs);
            let id = jobs.keys().next_back().map_or(1, |k| k + 1);
            let view = JobView {
                id,
                entity: sub.entity,
                request: sub.request,
                policy,
                source,
                status: JobStatus::Pending,
                counts: JobCounts::default(),
                generation: self.generation.generation,
                truncated: false,
                error: None,
            };
            jobs.insert(id, view.clone());
            view
        };
        if self.queue.send(view.id).is_err() {
            self.active.fetch_sub(1, Ordering::SeqCst);
            self.update(view.id, |j| j.status = JobStatus::Failed);
        }
        Ok(view)
    }

    pub fn job(&self, id: u64) -> Result<JobView> {
        lock(&self.jobs).get(&id).cloned().ok_or(AppError::UnknownJob(id))
    }

    fn update(&self, id: u64, f: impl FnOnce(&mut JobView)) {
        if let Some(j) = lock(&self.jobs).get_mut(&id) {
            f(j);
        }
    }

    fn run_job(&self, id: u64) {
        let Ok(job) = self.job(id) else { return };
        self.update(id, |j| j.status = JobStatus::Running);
        match self.execute(&job) {
            Ok(truncated) => self.update(id, |j| {
                j.status = JobStatus::Done;
                if let Some(e) = truncated {
                    j.truncated = true;
                    j.error = Some(e.body());
                }
            }),
            Err(e) => self.update(id, |j| {
                j.status = JobStatus::Failed;
                j.error = Some(e.body());
            }),
        }
    }

    /// Returns the source error when collection was cut short.
    fn execute(&self, job: &JobView) -> Result<Option<AppError>> {
        let query = ingest::format_query(&job.request)?;
        let stream = (self.opener)(&job.source, &query)?;
        let collection = ingest::collect(stream, &job.request, &job.policy);
        self.update(job.id, |j| j.counts.collected = collection.posts.len() as u64);
        for chunk in collection.posts.chunks(self.config.chunk_size.max(1)) {
            let records = score_posts(&self.scorer, chunk, Some(&job.entity))?;
            let n = records.len() as u64;
            self.store.append_notify(&job.entity, job.generation, chunk.iter().cloned().zip(records), |fresh| {
                for r in fresh {
                    let _ = self.events.send(r.clone());
                }
            })?;
            self.update(job.id, |j| j.counts.scored += n);
        }
        Ok(collection.error.map(AppError::from))
    }

    fn records(&self, entity: &str) -> Result<Vec<Arc<StoredRecord>>> {
        self.store.records(entity).ok_or_else(|| AppError::UnknownEntity(entity.to_string()))
    }

    pub fn entity_summary(&self, entity: &str, window: &Window) -> Result<EntitySummary> {
        let records = self.records(entity)?;
        Ok(analytics::summarize(entity, records.iter().map(|r| &r.record), window)?)
    }

    /// Summary after relabeling every stored record under `alpha` from its
    /// persisted component scores. Read-only.
    pub fn whatif(&self, entity: &str, alpha: f64) -> Result<EntitySummary> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(CoreError::InvalidScore(alpha).into());
        }
        let cfg = EnsembleConfig { alpha, ..*self.ensemble() };
        let relabeled = relabel(self.records(entity)?.iter().map(|r| &r.record), &cfg)?;
        Ok(analytics::summarize(entity, &relabeled, &Window::default())?)
    }

    pub fn series(&self, entity: &str, bucket_width_secs: i64) -> Result<SentimentSeries> {
        let records = self.records(entity)?;
        Ok(analytics::series(records.iter().map(|r| &r.record), bucket_width_secs)?)
    }

    pub fn drivers(&self, entity: &str, k: usize) -> Result<DriverReport> {
        let records = self.records(entity)?;
        let stop = &self.scorer.preprocessor().resources().stopwords;
        Ok(analytics::drivers(entity, records.iter().map(|r| &r.record), k, stop)?)
    }
}

/// Copies of `records` with `s_final` and `label` recomputed under `cfg`.
pub fn relabel<'a>(
    records: impl IntoIterator<Item = &'a SentimentRecord>,
    cfg: &EnsembleConfig,
) -> Result<Vec<SentimentRecord>> {
    records
        .into_iter()
        .map(|r| {
            let (s, label) = r.rescored(cfg)?;
            Ok(SentimentRecord { s_final: s, label, alpha: cfg.alpha, ..r.clone() })
        })
        .collect()
}

impl IntoResponse for AppError {
    fn into_response(self) -> Response {
        let status = match self.code() {
            "invalid_request" | "invalid_input" | "invalid_score" | "parse_error" | "usage" => StatusCode::BAD_REQUEST,
            "unknown_entity" | "unknown_job" => StatusCode::NOT_FOUND,
            "empty_window" | "insufficient_data" | "empty_input" => StatusCode::UNPROCESSABLE_ENTITY,
            "queue_full" | "backend_unavailable" | "source_unavailable" => StatusCode::SERVICE_UNAVAILABLE,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(self.body())).into_response()
    }
}

type Shared = State<Arc<AppState>>;

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/jobs", post(submit_job))
        .route("/jobs/{id}", get(get_job))
        .route("/entities", get(list_entities))
        .route("/entities/{entity}/summary", get(summary))
        .route("/entities/{entity}/series", get(series))
        .route("/entities/{entity}/drivers", get(drivers))
        .route("/entities/{entity}/whatif", get(whatif))
        .route("/stream", get(stream_events))
        .with_state(state)
}

async fn healthz(State(st): Shared) -> Json<serde_json::Value> {
    Json(serde_json::json!({
        "status": "ok",
        "records": st.store.len(),
        "generation": st.generation.generation,
        "alpha": st.ensemble().alpha,
    }))
}

async fn submit_job(State(st): Shared, body: Bytes) -> Result<(StatusCode, Json<JobView>)> {
    let sub: JobSubmission =
        serde_json::from_slice(&body).map_err(|e| CoreError::InvalidRequest(format!("bad job body: {e}")))?;
    Ok((StatusCode::ACCEPTED, Json(st.submit(sub)?)))
}

async fn get_job(State(st): Shared, Path(id): Path<String>) -> Result<Json<JobView>> {
    let id: u64 = id.parse().map_err(|_| CoreError::InvalidRequest(format!("bad job id `{id}`")))?;
    Ok(Json(st.job(id)?))
}

#[derive(Serialize)]
struct EntityEntry {
    entity: String,
    n: usize,
}

async fn list_entities(State(st): Shared) -> Json<Vec<EntityEntry>> {
    Json(st.store.entities().into_iter().map(|(entity, n)| EntityEntry { entity, n }).collect())
}

/// RFC 3339 instant or `YYYY-MM-DD`; a bare date as the upper bound means
/// the end of that day.
fn parse_bound(raw: &str, upper: bool) -> Result<DateTime<Utc>> {
    if let Ok(t) = DateTime::parse_from_rfc3339(raw) {
        return Ok(t.with_timezone(&Utc));
    }
    let date = NaiveDate::parse_from_str(raw, "%Y-%m-%d")
        .map_err(|_| CoreError::InvalidRequest(format!("bad time bound `{raw}`")))?;
    let time =
        if upper { NaiveTime::from_hms_nano_opt(23, 59, 59, 999_999_999).expect("valid time") } else { NaiveTime::MIN };
    Ok(date.and_time(time).and_utc())
}

#[derive(Deserialize)]
struct SummaryQuery {
    from: Option<String>,
    to: Option<String>,
}

async fn summary(
    State(st): Shared,
    Path(entity): Path<String>,
    Query(q): Query<SummaryQuery>,
) -> Result<Json<EntitySummary>> {
    let window = Window {
        start: q.from.as_deref().map(|s| parse_bound(s, false)).transpose()?,
        end: q.to.as_deref().map(|s| parse_bound(s, true)).transpose()?,
    };
    Ok(Json(st.entity_summary(&entity, &window)?))
}

#[derive(Deserialize)]
struct SeriesQuery {
    bucket: Option<String>,
    format: Option<String>,
}

async fn series(State(st): Shared, Path(entity): Path<String>, Query(q): Query<SeriesQuery>) -> Result<Response> {
    let width = analytics::parse_bucket_width(q.bucket.as_deref().unwrap_or("1d"))?;
    let s = st.series(&entity, width)?;
    Ok(match q.format.as_deref() {
        Some("csv") => ([(header::CONTENT_TYPE, "text/csv")], s.to_csv()).into_response(),
        None | Some("json") => Json(s).into_response(),
        Some(other) => return Err(CoreError::InvalidRequest(format!("unknown format `{other}`")).into()),
    })
}

#[derive(Deserialize)]
struct DriversQuery {
    k: Option<usize>,
}

async fn drivers(
    State(st): Shared,
    Path(entity): Path<String>,
    Query(q): Query<DriversQuery>,
) -> Result<Json<DriverReport>> {
    Ok(Json(st.drivers(&entity, q.k.unwrap_or(10))?))
}

#[derive(Deserialize)]
struct WhatifQuery {
    alpha: Option<String>,
}

async fn whatif(
    State(st): Shared,
    Path(entity): Path<String>,
    Query(q): Query<WhatifQuery>,
) -> Result<Json<EntitySummary>> {
    let raw = q.alpha.ok_or_else(|| CoreError::InvalidRequest("missing `alpha`".into()))?;
    let alpha: f64 = raw.parse().map_err(|_| CoreError::InvalidRequest(format!("bad alpha `{raw}`")))?;
    Ok(Json(st.whatif(&entity, alpha)?))
}

#[derive(Deserialize)]
struct StreamQuery {
    cursor: Option<String>,
}

struct Feed {
    backlog: VecDeque<Arc<StoredRecord>>,
    rx: broadcast::Receiver<Arc<StoredRecord>>,
    last: u64,
    finished: bool,
}

fn record_event(r: &StoredRecord) -> Event {
    Event::default().id(r.seq.to_string()).data(serde_json::to_string(r).expect("record serializes"))
}

/// Replays records after `cursor` (or nothing, for a live tail), then
/// forwards live records. A subscriber that falls behind the broadcast
/// buffer gets a final `dropped` event carrying the cursor to resume from.
async fn stream_events(State(st): Shared, Query(q): Query<StreamQuery>) -> Result<Response> {
    let cursor = match q.cursor.as_deref().filter(|c| !c.is_empty()) {
        Some(c) => Some(c.parse::<u64>().map_err(|_| CoreError::InvalidRequest(format!("bad cursor `{c}`")))?),
        None => None,
    };
    let rx = st.events.subscribe();
    let (backlog, last) = match cursor {
        Some(c) => {
            let backlog: VecDeque<_> = st.store.since(c).into();
            let last = backlog.back().map_or(c, |r| r.seq);
            (backlog, last)
        }
        None => (VecDeque::new(), st.store.last_seq()),
    };
    let feed = Feed { backlog, rx, last, finished: false };
    let events = stream::unfold(feed, |mut f| async move {
        if f.finished {
            return None;
        }
        if let Some(r) = f.backlog.pop_front() {
            return Some((Ok::<_, Infallible>(record_event(&r)), f));
        }
        loop {
            match f.rx.recv().await {
                Ok(r) if r.seq <= f.last => continue,
                Ok(r) => {
                    f.last = r.seq;
                    return Some((Ok(record_event(&r)), f));
                }
                Err(broadcast::error::RecvError::Lagged(_)) => {
                    f.finished = true;
                    let body = serde_json::json!({"error": "subscriber_lagged", "cursor": f.last});
                    return Some((Ok(Event::default().event("dropped").data(body.to_string())), f));
                }
                Err(broadcast::error::RecvError::Closed) => return None,
            }
        }
    });
    Ok(Sse::new(events).keep_alive(KeepAlive::new().interval(st.config.heartbeat).text("heartbeat")).into_response())
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    state: Arc<AppState>,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await
}
