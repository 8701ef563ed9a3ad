#![allow(dead_code)]

use std::io::Write;
use std::path::Path;
use std::sync::mpsc;

use axum::Router;
use chrono::{DateTime, Duration, TimeZone, Utc};
use pulsegauge_core::ingest::RawPost;

/// Serves `app` on an ephemeral port from a background runtime and returns
/// its base URL.
pub fn spawn_server(app: Router) -> String {
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Builder::new_multi_thread().worker_threads(2).enable_all().build().unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(listener.local_addr().unwrap()).unwrap();
            axum::serve(listener, app).await.unwrap();
        });
    });
    format!("http://{}", rx.recv().unwrap())
}

pub fn at(day: u32, minute: i64) -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 3, day, 9, 0, 0).unwrap() + Duration::minutes(minute)
}

pub fn post(id: &str, created_at: DateTime<Utc>, text: &str) -> RawPost {
    RawPost {
        id: id.to_string(),
        created_at,
        text: text.to_string(),
        author_id: format!("author-{id}"),
        author_created_at: Utc.with_ymd_and_hms(2015, 1, 1, 0, 0, 0).unwrap(),
        author_post_count: 300,
        like_count: 20,
        reply_count: 3,
        is_retweet: false,
        lang_hint: Some("en".into()),
    }
}

pub const TEXTS: [&str; 8] = [
    "I love the new phone, the camera is great",
    "terrible support, I hate waiting on hold",
    "the store opens at nine on monday",
    "awesome delivery, really fast and friendly",
    "worst update ever, the app keeps crashing",
    "quarterly earnings call is scheduled for thursday",
    "not bad at all, pretty good value",
    "so disappointed with the broken charger",
];

/// `n` distinct posts spread over March 2024.
pub fn posts(prefix: &str, n: usize) -> Vec<RawPost> {
    (0..n)
        .map(|i| post(&format!("{prefix}-{i:04}"), at(1 + (i % 28) as u32, i as i64), TEXTS[i % TEXTS.len()]))
        .collect()
}

pub fn write_jsonl<T: serde::Serialize>(path: &Path, items: &[T]) {
    let mut f = std::fs::File::create(path).unwrap();
    for item in items {
        writeln!(f, "{}", serde_json::to_string(item).unwrap()).unwrap();
    }
}

pub fn read_jsonl(text: &str) -> Vec<serde_json::Value> {
    text.lines().filter(|l| !l.trim().is_empty()).map(|l| serde_json::from_str(l).unwrap()).collect()
}
