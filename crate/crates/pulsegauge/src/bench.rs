//! Per-item latency measurement.

use std::time::Instant;

/// Mean wall-clock milliseconds of `f` over `texts`, one call per text,
/// after `warmup` untimed calls cycling through the same texts.
pub fn benchmark_latency<T>(mut f: impl FnMut(&str) -> T, texts: &[&str], warmup: usize) -> Option<f64> {
    if texts.is_empty() {
        return None;
    }
    for t in texts.iter().cycle().take(warmup) {
        std::hint::black_box(f(t));
    }
    let start = Instant::now();
    for t in texts {
        std::hint::black_box(f(t));
    }
    Some(start.elapsed().as_secs_f64() * 1000.0 / texts.len() as f64)
}
