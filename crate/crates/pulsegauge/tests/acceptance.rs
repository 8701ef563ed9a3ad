//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runs without the dashboard.

mod common;

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Stdio};
use std::time::{Duration, Instant};

use chrono::{Duration as Span, TimeZone, Utc};
use pulsegauge_core::analytics::{csi, tier, Tier};
use pulsegauge_core::contextual::{polarity_score, ReferenceModel};
use pulsegauge_core::ensemble::{combine, grid_search_alpha, label, EnsembleConfig, Label, ValidationExample};
use pulsegauge_core::evaluation::{confusion, evaluate};
use pulsegauge_core::ingest::{collect, CollectionRequest, FilterPolicy, RawPost};
use pulsegauge_core::pipeline::HybridScorer;
use pulsegauge_core::textprep::{PrepProfile, Preprocessor};
use pulsegauge_core::vader::{Lexicon, Vader, VaderConfig};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

type Check = fn() -> Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn main() {
    let checks: [(&str, Check); 9] = [
        ("lexicon golden suite and single-token closed form", lexicon_golden),
        ("weighted fusion exactness and single-model degeneracy", fusion_exactness),
        ("label threshold conformance", threshold_conformance),
        ("sentiment index values, tiers and concatenation consistency", index_and_tiers),
        ("collection filters on planted violations", collection_filters),
        ("metrics against brute-force tally", metrics_oracle),
        ("weight grid search: planted optima and exhaustive scan", grid_search),
        ("end-to-end replay: demo, pipes and kill-restart", end_to_end_replay),
        ("what-if recomputability and weight sweep", whatif_recomputability),
    ];
    let quiet = std::panic::take_hook();
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{}] {name} ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    std::panic::set_hook(quiet);
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    std::io::stdout().flush().ok();
    if failed > 0 {
        std::process::exit(1);
    }
}

fn lexicon_golden() -> Result<String, String> {
    #[derive(serde::Deserialize)]
    struct Golden {
        tokens: Vec<String>,
        caps: Vec<bool>,
        exclamations: usize,
        pos: f64,
        neg: f64,
        neu: f64,
        compound: f64,
    }
    let start = Instant::now();
    let vader = Vader::bundled();
    let golden = include_str!("../../core/tests/data/vader_golden.jsonl");
    let cases: Vec<Golden> = golden.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    ensure!(cases.len() == 50, "expected 50 golden texts, found {}", cases.len());
    let mut worst = 0.0f64;
    for g in &cases {
        let s = vader.score(&g.tokens, &g.caps, g.exclamations);
        for (got, want) in [(s.compound, g.compound), (s.pos, g.pos), (s.neg, g.neg), (s.neu, g.neu)] {
            worst = worst.max((got - want).abs());
            ensure!((got - want).abs() < 5e-5, "{:?}: {got} vs {want}", g.tokens);
        }
    }
    let mut sweep = 0;
    let mut v = -4.0;
    while v <= 4.0 + 1e-12 {
        let mut lex = Lexicon::default();
        lex.insert("w", v);
        let got = Vader::new(lex, VaderConfig::default()).unwrap().score(&["w"], &[false], 0).compound;
        let want = v / (v * v + 15.0_f64).sqrt();
        ensure!((got - want).abs() < 1e-9, "closed form at v={v}: {got} vs {want}");
        sweep += 1;
        v += 0.01;
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("50 texts, max deviation {worst:.1e}; {sweep} valences in closed form"))
}

fn threshold(s: f64) -> Label {
    if s >= 0.6 {
        Label::Positive
    } else if s <= 0.4 {
        Label::Negative
    } else {
        Label::Neutral
    }
}

fn fusion_exactness() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(17);
    for _ in 0..10_000 {
        let (v, c, a): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
        let cfg = EnsembleConfig { alpha: a, ..EnsembleConfig::default() };
        let s = combine(v, c, &cfg).map_err(|e| e.to_string())?;
        ensure!((s - (a * v + (1.0 - a) * c)).abs() <= 1e-12, "({v}, {c}, {a}) -> {s}");
    }

    let prep = Preprocessor::bundled();
    let vader = Vader::bundled();
    let model = ReferenceModel::bundled().map_err(|e| e.to_string())?;
    let texts: Vec<String> = common::read_jsonl(include_str!("../data/train.jsonl"))
        .into_iter()
        .take(500)
        .map(|r| r["text"].as_str().unwrap().to_string())
        .collect();
    ensure!(texts.len() == 500, "fixture has {} posts", texts.len());
    let only_vader = HybridScorer::bundled(EnsembleConfig { alpha: 1.0, ..Default::default() }).unwrap();
    let only_ctx = HybridScorer::bundled(EnsembleConfig { alpha: 0.0, ..Default::default() }).unwrap();
    let mut differ = 0;
    for t in &texts {
        let compound = vader.score_sequence(&prep.preprocess(t, &PrepProfile::VADER)).compound;
        let vader_label = threshold((compound + 1.0) / 2.0);
        let dist = model.predict(&prep.preprocess(t, &PrepProfile::CONTEXTUAL).joined());
        let ctx_label = threshold(polarity_score(&dist));
        let a1 = only_vader.score_text(t).unwrap().label;
        let a0 = only_ctx.score_text(t).unwrap().label;
        ensure!(a1 == vader_label, "alpha=1 on {t:?}: {a1} vs {vader_label}");
        ensure!(a0 == ctx_label, "alpha=0 on {t:?}: {a0} vs {ctx_label}");
        differ += usize::from(vader_label != ctx_label);
    }
    Ok(format!("10000 triples within 1e-12; 500 posts degenerate correctly ({differ} where the models disagree)"))
}

fn threshold_conformance() -> Result<String, String> {
    let cfg = EnsembleConfig::default();
    ensure!(label(0.6, &cfg) == Label::Positive, "0.6");
    ensure!(label(0.4, &cfg) == Label::Negative, "0.4");
    ensure!(label(0.5, &cfg) == Label::Neutral, "0.5");
    let mut counts = BTreeMap::new();
    for i in 0..=1000 {
        let s = f64::from(i) / 1000.0;
        let l = label(s, &cfg);
        let matches = Label::ALL.iter().filter(|&&c| c == threshold(s)).count();
        ensure!(matches == 1 && l == threshold(s), "S={s}: {l}");
        *counts.entry(l.as_str()).or_insert(0) += 1;
    }
    Ok(format!("1001 sweep points, each labeled once: {counts:?}"))
}

fn index_and_tiers() -> Result<String, String> {
    let start = Instant::now();
    let scores = [0.812; 40];
    let v = csi(&scores).map_err(|e| e.to_string())?;
    ensure!((v - 81.2).abs() < 1e-9, "csi = {v}");
    ensure!(tier(v) == Tier::Excellent, "tier(81.2) = {:?}", tier(v));
    ensure!(tier(21.7) == Tier::Poor, "tier(21.7)");
    ensure!(tier(27.3) == Tier::Average, "tier(27.3)");
    let mut rng = StdRng::seed_from_u64(23);
    for _ in 0..500 {
        let n = rng.random_range(2..200);
        let all: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let mut parts = Vec::new();
        let mut rest = &all[..];
        while !rest.is_empty() {
            let k = rng.random_range(1..=rest.len());
            parts.push(&rest[..k]);
            rest = &rest[k..];
        }
        let weighted: f64 = parts.iter().map(|p| csi(p).unwrap() * p.len() as f64).sum::<f64>() / n as f64;
        let whole = csi(&all).unwrap();
        ensure!((weighted - whole).abs() < 1e-9, "{weighted} vs {whole}");
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok("csi 81.2 Excellent, 21.7 Poor, 27.3 Average; 500 random partitions consistent".into())
}

fn planted_posts(seed: u64) -> Vec<RawPost> {
    let mut rng = StdRng::seed_from_u64(seed);
    let base = Utc.with_ymd_and_hms(2024, 2, 1, 0, 0, 0).unwrap();
    (0..1000)
        .map(|i| {
            let created_at = base + Span::minutes(rng.random_range(0..60 * 24 * 28));
            let mut p = common::post(&format!("p{i:04}"), created_at, common::TEXTS[i % common::TEXTS.len()]);
            p.author_created_at = created_at - Span::days(rng.random_range(1..2000));
            p.author_post_count = rng.random_range(1..3000);
            p.like_count = rng.random_range(0..12);
            p.reply_count = rng.random_range(0..4);
            match i % 10 {
                0 => p.is_retweet = true,
                1 => (p.like_count, p.reply_count) = (2, 2),
                2 => {
                    p.author_created_at = created_at - Span::days(10);
                    p.author_post_count = 5000;
                }
                3 => p.id = format!("p{:04}", i - 1),
                _ => {}
            }
            p
        })
        .collect()
}

fn collection_filters() -> Result<String, String> {
    let posts = planted_posts(41);
    let req = CollectionRequest::new(
        "acme",
        400,
        chrono::NaiveDate::from_ymd_opt(2024, 2, 1).unwrap(),
        chrono::NaiveDate::from_ymd_opt(2024, 2, 28).unwrap(),
    )
    .unwrap();
    let policy = FilterPolicy::default();
    ensure!(policy.min_engagement == 5, "default min engagement {}", policy.min_engagement);
    let runs: Vec<Vec<RawPost>> = (0..5).map(|_| collect(posts.iter().cloned().map(Ok), &req, &policy).posts).collect();
    let out = &runs[0];
    ensure!(runs.iter().all(|r| r == out), "runs differ");
    ensure!(out.len() <= 400, "{} posts over the cap", out.len());
    ensure!(!out.is_empty(), "everything filtered");
    for p in out {
        ensure!(!p.is_retweet, "retweet {}", p.id);
        ensure!(p.like_count + p.reply_count >= 5, "low engagement {}", p.id);
        let days = ((p.created_at - p.author_created_at).num_seconds() as f64 / 86_400.0).max(1.0);
        ensure!(p.author_post_count as f64 / days <= policy.bot_posts_per_day_max, "bot-like {}", p.id);
    }
    let mut ids: Vec<&str> = out.iter().map(|p| p.id.as_str()).collect();
    ids.sort();
    ids.dedup();
    ensure!(ids.len() == out.len(), "duplicate ids in output");

    let uncapped = CollectionRequest::new("acme", 5000, req.start_date(), req.end_date()).unwrap();
    let all = collect(posts.iter().cloned().map(Ok), &uncapped, &policy).posts;
    Ok(format!(
        "1000 posts -> {} kept at cap 400 ({} pass without the cap), identical over 5 runs",
        out.len(),
        all.len()
    ))
}

/// Confusion, accuracy and per-class (precision, recall, f1).
type Tally = ([[u64; 3]; 3], f64, [(f64, f64, f64); 3]);

fn tally(golds: &[Label], preds: &[Label]) -> Tally {
    let classes = [Label::Positive, Label::Neutral, Label::Negative];
    let mut m = [[0u64; 3]; 3];
    for (g, p) in golds.iter().zip(preds) {
        let gi = classes.iter().position(|c| c == g).unwrap();
        let pi = classes.iter().position(|c| c == p).unwrap();
        m[gi][pi] += 1;
    }
    let correct = golds.iter().zip(preds).filter(|(g, p)| g == p).count();
    let mut per = [(0.0, 0.0, 0.0); 3];
    for (k, c) in classes.iter().enumerate() {
        let tp = golds.iter().zip(preds).filter(|(g, p)| *g == c && *p == c).count() as f64;
        let fp = golds.iter().zip(preds).filter(|(g, p)| *g != c && *p == c).count() as f64;
        let fnn = golds.iter().zip(preds).filter(|(g, p)| *g == c && *p != c).count() as f64;
        let p = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
        let r = if tp + fnn > 0.0 { tp / (tp + fnn) } else { 0.0 };
        let f = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
        per[k] = (p, r, f);
    }
    (m, correct as f64 / golds.len() as f64, per)
}

fn random_labels(rng: &mut StdRng, n: usize) -> Vec<Label> {
    (0..n).map(|_| Label::ALL[rng.random_range(0..3)]).collect()
}

fn metrics_oracle() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(5);
    for round in 0..100 {
        let golds = random_labels(&mut rng, 50);
        let preds = random_labels(&mut rng, 50);
        let report = evaluate(&golds, &preds).map_err(|e| e.to_string())?;
        let (m, acc, per) = tally(&golds, &preds);
        ensure!(confusion(&golds, &preds).unwrap() == m && report.confusion == m, "round {round}: confusion");
        ensure!(report.accuracy == acc, "round {round}: accuracy {} vs {acc}", report.accuracy);
        for (k, c) in [Label::Positive, Label::Neutral, Label::Negative].into_iter().enumerate() {
            let got = report.per_class.get(c);
            ensure!(
                (got.precision, got.recall, got.f1) == per[k],
                "round {round}: {c} {:?} vs {:?}",
                (got.precision, got.recall, got.f1),
                per[k]
            );
        }
    }
    Ok("100 labelings of 50 examples match exactly".into())
}

fn oracle_macro_f1(val: &[ValidationExample], alpha: f64) -> f64 {
    let golds: Vec<Label> = val.iter().map(|e| e.gold).collect();
    let preds: Vec<Label> = val.iter().map(|e| threshold(alpha * e.s_vader + (1.0 - alpha) * e.s_contextual)).collect();
    let (_, _, per) = tally(&golds, &preds);
    (per[0].2 + per[1].2 + per[2].2) / 3.0
}

fn grid_search() -> Result<String, String> {
    let base = EnsembleConfig::default();
    let ex = |v, c, gold| ValidationExample { s_vader: v, s_contextual: c, gold };
    let planted_one: Vec<_> = (0..30)
        .flat_map(|_| [ex(0.6, 0.0, Label::Positive), ex(0.4, 1.0, Label::Negative), ex(0.5, 0.5, Label::Neutral)])
        .collect();
    let planted_zero: Vec<_> = planted_one.iter().map(|e| ex(e.s_contextual, e.s_vader, e.gold)).collect();
    let one = grid_search_alpha(&planted_one, 0.05, &base).map_err(|e| e.to_string())?;
    let zero = grid_search_alpha(&planted_zero, 0.05, &base).map_err(|e| e.to_string())?;
    ensure!(one.alpha == 1.0 && one.macro_f1 == 1.0, "planted 1 found {} ({})", one.alpha, one.macro_f1);
    ensure!(zero.alpha == 0.0 && zero.macro_f1 == 1.0, "planted 0 found {} ({})", zero.alpha, zero.macro_f1);

    let mut rng = StdRng::seed_from_u64(99);
    for round in 0..50 {
        let n = rng.random_range(10..80);
        let val: Vec<ValidationExample> =
            (0..n).map(|_| ex(rng.random(), rng.random(), Label::ALL[rng.random_range(0..3)])).collect();
        let got = grid_search_alpha(&val, 0.05, &base).map_err(|e| e.to_string())?;
        let (mut best_a, mut best_f) = (0.0, f64::MIN);
        for i in 0..=20 {
            let a = f64::from(i) / 20.0;
            let f = oracle_macro_f1(&val, a);
            if f > best_f {
                (best_a, best_f) = (a, f);
            }
        }
        ensure!(
            (got.alpha - best_a).abs() < 1e-12 && (got.macro_f1 - best_f).abs() < 1e-12,
            "round {round}: got ({}, {}) want ({best_a}, {best_f})",
            got.alpha,
            got.macro_f1
        );
    }
    Ok("planted optima 0 and 1 recovered; 50 random sets match the exhaustive scan".into())
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_pulsegauge"));
    for var in ["PG_ALPHA", "PG_BACKEND", "PG_SOURCE", "PG_MIN_ENGAGEMENT", "PG_LISTEN", "PG_DATA_DIR"] {
        c.env_remove(var);
    }
    c
}

fn run(args: &[&str], stdin: Option<&[u8]>) -> Result<Vec<u8>, String> {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| e.to_string())?;
    let input = stdin.unwrap_or_default().to_vec();
    let mut pipe = child.stdin.take().unwrap();
    let writer = std::thread::spawn(move || pipe.write_all(&input));
    let out = child.wait_with_output().map_err(|e| e.to_string())?;
    writer.join().unwrap().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

struct Server {
    child: Child,
    base: String,
}

impl Server {
    fn start(data_dir: &Path) -> Result<Server, String> {
        let mut child = bin()
            .args(["serve", "--listen", "127.0.0.1:0", "--data-dir"])
            .arg(data_dir)
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| e.to_string())?;
        let mut line = String::new();
        BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).map_err(|e| e.to_string())?;
        let v: Value = serde_json::from_str(&line).map_err(|e| format!("bad banner {line:?}: {e}"))?;
        Ok(Server { child, base: format!("http://{}", v["listening"].as_str().unwrap()) })
    }

    fn get(&self, path: &str) -> Result<String, String> {
        let mut resp = ureq::get(&format!("{}{path}", self.base)).call().map_err(|e| format!("{path}: {e}"))?;
        resp.body_mut().read_to_string().map_err(|e| e.to_string())
    }

    fn replay(&self, fixture: &Path, entities: &[String]) -> Result<(), String> {
        let mut ids = Vec::new();
        for e in entities {
            let body = serde_json::json!({
                "entity": e,
                "request": {"query": e, "max_items": 500, "start_date": "2024-01-01", "end_date": "2024-06-30"},
                "source": format!("file:{}", fixture.join(format!("{e}.jsonl")).display()),
            });
            let mut resp =
                ureq::post(&format!("{}/jobs", self.base)).send_json(&body).map_err(|err| err.to_string())?;
            let view: Value = serde_json::from_str(&resp.body_mut().read_to_string().unwrap()).unwrap();
            ids.push(view["id"].as_u64().unwrap());
        }
        let deadline = Instant::now() + Duration::from_secs(30);
        for id in ids {
            loop {
                let job: Value = serde_json::from_str(&self.get(&format!("/jobs/{id}"))?).unwrap();
                match job["status"].as_str() {
                    Some("done") => break,
                    Some("failed") => return Err(format!("job {id} failed: {job}")),
                    _ if Instant::now() > deadline => return Err(format!("job {id} stuck")),
                    _ => std::thread::sleep(Duration::from_millis(20)),
                }
            }
        }
        Ok(())
    }

    fn summaries(&self, entities: &[String]) -> Result<Vec<String>, String> {
        entities.iter().map(|e| self.get(&format!("/entities/{e}/summary"))).collect()
    }

    fn kill(mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
    }
}

/// Writes the bundled corpus and returns its directory and entity names.
fn fixture(dir: &Path) -> Result<(PathBuf, Vec<String>), String> {
    let fixture = dir.join("fixture");
    run(&["demo", "--write-fixture", fixture.to_str().unwrap()], None)?;
    let mut entities: Vec<String> = std::fs::read_dir(&fixture)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok()?.path().file_stem()?.to_str().map(String::from))
        .collect();
    entities.sort();
    Ok((fixture, entities))
}

fn end_to_end_replay() -> Result<String, String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let demo = run(&["demo"], None)?;
    let demo_time = start.elapsed();
    ensure!(demo_time < Duration::from_secs(10), "demo took {demo_time:?}");
    let rows = common::read_jsonl(std::str::from_utf8(&demo).unwrap());

    let (fixture, entities) = fixture(tmp.path())?;
    ensure!(entities.len() == 4, "fixture entities {entities:?}");
    let total: usize = entities
        .iter()
        .map(|e| std::fs::read_to_string(fixture.join(format!("{e}.jsonl"))).unwrap().lines().count())
        .sum();
    ensure!(total == 200, "fixture has {total} posts");

    let mut scored = Vec::new();
    for e in &entities {
        let file = fixture.join(format!("{e}.jsonl"));
        let collected = run(
            &["collect", "--in", file.to_str().unwrap(), "--query", e, "--start", "2024-01-01", "--end", "2024-06-30"],
            None,
        )?;
        let prepped = run(&["preprocess", "--in", "-"], Some(&collected))?;
        scored.extend(run(&["score", "--in", "-", "--entity", e], Some(&prepped))?);
    }
    let piped = run(&["analyze", "--in", "-"], Some(&scored))?;
    ensure!(piped == demo, "piped stages differ from demo output");

    let store = tmp.path().join("store");
    let server = Server::start(&store)?;
    server.replay(&fixture, &entities)?;
    let before = server.summaries(&entities)?;
    for (served, row) in before.iter().zip(&rows) {
        let served: Value = serde_json::from_str(served).unwrap();
        ensure!(served == row["summary"], "served summary differs from demo for {}", row["entity"]);
    }
    server.kill();

    let server = Server::start(&store)?;
    let after_restart = server.summaries(&entities)?;
    ensure!(after_restart == before, "summaries changed across kill-restart");
    server.replay(&fixture, &entities)?;
    let after_replay = server.summaries(&entities)?;
    ensure!(after_replay == before, "summaries changed after replaying jobs");
    let listed: Value = serde_json::from_str(&server.get("/entities")?).unwrap();
    let n: u64 = listed.as_array().unwrap().iter().map(|e| e["n"].as_u64().unwrap()).sum();
    server.kill();
    Ok(format!(
        "demo in {:.2}s; pipes byte-identical; {n} stored records, summaries byte-identical after kill-restart and replay",
        demo_time.as_secs_f64()
    ))
}

fn whatif_recomputability() -> Result<String, String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (fixture, entities) = fixture(tmp.path())?;
    let store = tmp.path().join("store");
    let server = Server::start(&store)?;
    server.replay(&fixture, &entities)?;
    let cfg = EnsembleConfig::default();

    let mut checked = 0;
    for e in &entities {
        let summary = server.get(&format!("/entities/{e}/summary"))?;
        let same = server.get(&format!("/entities/{e}/whatif?alpha={}", cfg.alpha))?;
        ensure!(same == summary, "{e}: whatif at the recorded weight differs");

        let segment = std::fs::read_to_string(store.join("segments").join(format!("{e}.jsonl"))).unwrap();
        let components: Vec<(f64, f64)> = common::read_jsonl(&segment)
            .iter()
            .map(|r| (r["s_vader"].as_f64().unwrap(), r["s_contextual"].as_f64().unwrap()))
            .collect();
        for i in 0..=20 {
            let alpha = f64::from(i) / 20.0;
            let got: Value =
                serde_json::from_str(&server.get(&format!("/entities/{e}/whatif?alpha={alpha}"))?).unwrap();
            let finals: Vec<f64> = components.iter().map(|(v, c)| alpha * v + (1.0 - alpha) * c).collect();
            let want_csi = 100.0 * finals.iter().sum::<f64>() / finals.len() as f64;
            let mut counts = [0u64; 3];
            for s in &finals {
                counts[threshold(*s).index()] += 1;
            }
            let got_csi = got["csi"].as_f64().unwrap();
            ensure!((got_csi - want_csi).abs() < 1e-9, "{e} alpha={alpha}: csi {got_csi} vs {want_csi}");
            let lc = &got["label_counts"];
            let got_counts = [&lc["positive"], &lc["neutral"], &lc["negative"]].map(|v| v.as_u64().unwrap());
            ensure!(got_counts == counts, "{e} alpha={alpha}: counts {got_counts:?} vs {counts:?}");
            checked += 1;
        }
    }
    server.kill();
    Ok(format!("{} entities at the recorded weight; {checked} sweep points match brute force", entities.len()))
}
