//! Three-class contextual classifier contract.
//!
//! Any backend yields a [`ClassDistribution`]; [`polarity_score`] maps it
//! onto the [0, 1] scale the ensemble fuses. Two backends live here: the
//! hashed bag-of-words [`ReferenceModel`] and the lookup-table
//! [`FixtureClassifier`]. The remote HTTP client is in the `pulsegauge`
//! crate and shares the wire types in [`wire`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::bundled;
use crate::ensemble::Label;
use crate::error::{Error, Result};

pub const DISTRIBUTION_TOLERANCE: f64 = 1e-9;

/// Class probabilities in the fixed order positive, negative, neutral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct ClassDistribution {
    p_pos: f64,
    p_neg: f64,
    p_neu: f64,
}

impl ClassDistribution {
    pub fn new(p_pos: f64, p_neg: f64, p_neu: f64) -> Result<Self> {
        let ps = [p_pos, p_neg, p_neu];
        if ps.iter().any(|p| !p.is_finite() || !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidInput(format!("probabilities must lie in [0, 1], got {ps:?}")));
        }
        let sum = p_pos + p_neg + p_neu;
        if (sum - 1.0).abs() > DISTRIBUTION_TOLERANCE {
            return Err(Error::InvalidInput(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(ClassDistribution { p_pos, p_neg, p_neu })
    }

    pub fn uniform() -> Self {
        ClassDistribution { p_pos: 1.0 / 3.0, p_neg: 1.0 / 3.0, p_neu: 1.0 / 3.0 }
    }

    pub fn p_pos(&self) -> f64 {
        self.p_pos
    }

    pub fn p_neg(&self) -> f64 {
        self.p_neg
    }

    pub fn p_neu(&self) -> f64 {
        self.p_neu
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.p_pos, self.p_neg, self.p_neu]
    }

    /// Most probable class; ties resolve positive, negative, neutral.
    pub fn argmax(&self) -> Label {
        let [p, n, u] = self.to_array();
        if p >= n && p >= u {
            Label::Positive
        } else if n >= u {
            Label::Negative
        } else {
            Label::Neutral
        }
    }
}

impl TryFrom<[f64; 3]> for ClassDistribution {
    type Error = Error;

    fn try_from(p: [f64; 3]) -> Result<Self> {
        ClassDistribution::new(p[0], p[1], p[2])
    }
}

impl From<ClassDistribution> for [f64; 3] {
    fn from(d: ClassDistribution) -> Self {
        d.to_array()
    }
}

/// Expected polarity `p_pos + 0.5 * p_neu`: 1 for certain positive, 0 for
/// certain negative.
pub fn polarity_score(dist: &ClassDistribution) -> f64 {
    (dist.p_pos + 0.5 * dist.p_neu).clamp(0.0, 1.0)
}

pub trait Classifier: Send + Sync {
    fn name(&self) -> &str;

    fn classify(&self, text: &str) -> Result<ClassDistribution>;

    /// Order-preserving batch form.
    fn classify_batch(&self, texts: &[&str]) -> Result<Vec<ClassDistribution>> {
        texts.iter().map(|t| self.classify(t)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Reference,
    Remote,
    Fixture,
}

/// Which backend to build. `model_path = "bundled"` selects the compiled-in
/// reference weights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackendDescriptor {
    pub kind: BackendKind,
    pub endpoint: Option<String>,
    pub model_path: Option<String>,
}

impl BackendDescriptor {
    pub const BUNDLED_MODEL: &'static str = "bundled";

    pub fn bundled_reference() -> Self {
        BackendDescriptor {
            kind: BackendKind::Reference,
            endpoint: None,
            model_path: Some(Self::BUNDLED_MODEL.to_string()),
        }
    }

    /// `reference[:<path>]`, `remote:<url>` or `fixture:<path>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (kind, arg) = match spec.split_once(':') {
            Some((k, a)) => (k, Some(a.trim()).filter(|a| !a.is_empty())),
            None => (spec, None),
        };
        let desc = match kind.trim() {
            "reference" => BackendDescriptor {
                kind: BackendKind::Reference,
                endpoint: None,
                model_path: Some(arg.unwrap_or(Self::BUNDLED_MODEL).to_string()),
            },
            "remote" => {
                BackendDescriptor { kind: BackendKind::Remote, endpoint: arg.map(String::from), model_path: None }
            }
            "fixture" => {
                BackendDescriptor { kind: BackendKind::Fixture, endpoint: None, model_path: arg.map(String::from) }
            }
            other => {
                return Err(Error::InvalidInput(format!("unknown backend kind `{other}`")));
            }
        };
        desc.validate()?;
        Ok(desc)
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            BackendKind::Remote if self.endpoint.is_none() => {
                Err(Error::InvalidInput("remote backend needs an endpoint".into()))
            }
            BackendKind::Reference | BackendKind::Fixture if self.model_path.is_none() => {
                Err(Error::InvalidInput("reference and fixture backends need a model path".into()))
            }
            _ => Ok(()),
        }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

fn softmax(logits: [f64; 3]) -> [f64; 3] {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps = logits.map(|l| libm::exp(l - max));
    let sum: f64 = exps.iter().sum();
    exps.map(|e| e / sum)
}

fn class_index(label: Label) -> usize {
    match label {
        Label::Positive => 0,
        Label::Negative => 1,
        Label::Neutral => 2,
    }
}

pub const MODEL_FORMAT: &str = "pulsegauge-hashed-bow";

/// Softmax regression over hashed unigram (and optionally bigram) features.
///
/// Features are lowercase whitespace tokens with pure punctuation removed;
/// each unigram `u:<tok>` and bigram `b:<tok> <tok>` is hashed with 64-bit
/// FNV-1a modulo `buckets`. Text without features gets the uniform
/// distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceModel {
    pub format: String,
    pub version: u32,
    pub buckets: u32,
    pub bigrams: bool,
    pub bias: [f64; 3],
    pub weights: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOptions {
    pub buckets: u32,
    pub bigrams: bool,
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions { buckets: 2048, bigrams: true, epochs: 300, learning_rate: 0.5, l2: 1e-4 }
    }
}

impl ReferenceModel {
    pub fn from_json(src: &str) -> Result<Self> {
        let model: ReferenceModel = serde_json::from_str(src).map_err(|e| Error::ModelLoad(e.to_string()))?;
        if model.format != MODEL_FORMAT {
            return Err(Error::ModelLoad(format!("unexpected format `{}`", model.format)));
        }
        if model.buckets == 0 || model.weights.len() != model.buckets as usize {
            return Err(Error::ModelLoad(format!(
                "expected {} weight rows, found {}",
                model.buckets,
                model.weights.len()
            )));
        }
        if model.weights.iter().flatten().chain(&model.bias).any(|w| !w.is_finite()) {
            return Err(Error::ModelLoad("non-finite weight".into()));
        }
        Ok(model)
    }

    pub fn bundled() -> Result<Self> {
        Self::from_json(bundled::REFERENCE_MODEL)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn features(&self, text: &str) -> Vec<usize> {
        hashed_features(text, self.buckets, self.bigrams)
    }

    fn logits(&self, features: &[usize]) -> [f64; 3] {
        let mut logits = self.bias;
        for &f in features {
            for (l, w) in logits.iter_mut().zip(self.weights[f]) {
                *l += w;
            }
        }
        logits
    }

    pub fn predict(&self, text: &str) -> ClassDistribution {
        let features = self.features(text);
        if features.is_empty() {
            return ClassDistribution::uniform();
        }
        let [p, n, u] = softmax(self.logits(&features));
        ClassDistribution { p_pos: p, p_neg: n, p_neu: u }
    }

    /// Full-batch gradient descent on the L2-regularized cross entropy.
    /// Deterministic: weights start at zero and examples are visited in order.
    pub fn train(examples: &[(String, Label)], opts: &TrainOptions) -> Result<Self> {
        if examples.is_empty() {
            return Err(Error::EmptyInput);
        }
        if opts.buckets == 0 {
            return Err(Error::InvalidInput("buckets must be positive".into()));
        }
        let feats: Vec<Vec<usize>> =
            examples.iter().map(|(t, _)| hashed_features(t, opts.buckets, opts.bigrams)).collect();
        let mut model = ReferenceModel {
            format: MODEL_FORMAT.to_string(),
            version: 1,
            buckets: opts.buckets,
            bigrams: opts.bigrams,
            bias: [0.0; 3],
            weights: vec![[0.0; 3]; opts.buckets as usize],
        };
        let n = examples.len() as f64;
        for _ in 0..opts.epochs {
            let mut grad_w = vec![[0.0; 3]; opts.buckets as usize];
            let mut grad_b = [0.0; 3];
            for (fs, (_, label)) in feats.iter().zip(examples) {
                let probs = softmax(model.logits(fs));
                let gold = class_index(*label);
                for k in 0..3 {
                    let err = probs[k] - if k == gold { 1.0 } else { 0.0 };
                    grad_b[k] += err;
                    for &f in fs {
                        grad_w[f][k] += err;
                    }
                }
            }
            for (w, g) in model.weights.iter_mut().zip(&grad_w) {
                for k in 0..3 {
                    w[k] -= opts.learning_rate * (g[k] / n + opts.l2 * w[k]);
                }
            }
            for (b, g) in model.bias.iter_mut().zip(grad_b) {
                *b -= opts.learning_rate * g / n;
            }
        }
        Ok(model)
    }
}

fn is_punct_only(tok: &str) -> bool {
    tok.chars().all(|c| !c.is_alphanumeric() && !matches!(c, ':' | '<' | '(' | ')'))
}

pub fn hashed_features(text: &str, buckets: u32, bigrams: bool) -> Vec<usize> {
    let tokens: Vec<String> = text.split_whitespace().filter(|t| !is_punct_only(t)).map(str::to_lowercase).collect();
    let bucket = |key: &str| (fnv1a(key.as_bytes()) % u64::from(buckets)) as usize;
    let mut out: Vec<usize> = tokens.iter().map(|t| bucket(&format!("u:{t}"))).collect();
    if bigrams {
        out.extend(tokens.windows(2).map(|w| bucket(&format!("b:{} {}", w[0], w[1]))));
    }
    out
}

impl Classifier for ReferenceModel {
    fn name(&self) -> &str {
        "reference"
    }

    fn classify(&self, text: &str) -> Result<ClassDistribution> {
        Ok(self.predict(text))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FixtureLine {
    text: String,
    p: ClassDistribution,
}

/// Echoes stored distributions for known texts.
#[derive(Debug, Clone, Default)]
pub struct FixtureClassifier {
    table: BTreeMap<String, ClassDistribution>,
}

impl FixtureClassifier {
    /// JSON Lines of `{"text": ..., "p": [p_pos, p_neg, p_neu]}`.
    pub fn parse(src: &str, name: &str) -> Result<Self> {
        let mut table = BTreeMap::new();
        for (i, line) in src.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let entry: FixtureLine =
                serde_json::from_str(line).map_err(|e| Error::parse(name, i + 1, e.to_string()))?;
            table.insert(entry.text, entry.p);
        }
        Ok(FixtureClassifier { table })
    }

    pub fn insert(&mut self, text: impl Into<String>, dist: ClassDistribution) {
        self.table.insert(text.into(), dist);
    }
}

impl Classifier for FixtureClassifier {
    fn name(&self) -> &str {
        "fixture"
    }

    fn classify(&self, text: &str) -> Result<ClassDistribution> {
        self.table.get(text).copied().ok_or_else(|| Error::InvalidInput(format!("text not in fixture: {text:?}")))
    }
}

/// JSON schema of the remote `/classify` endpoint.
pub mod wire {
    use super::*;

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    pub struct ClassifyRequest {
        pub texts: Vec<String>,
    }

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    pub struct ClassifyResponse {
        pub distributions: Vec<Vec<f64>>,
    }

    /// Validates a response body for a batch of `expected` texts.
    pub fn decode_response(body: &str, expected: usize) -> Result<Vec<ClassDistribution>> {
        let resp: ClassifyResponse =
            serde_json::from_str(body).map_err(|e| Error::MalformedResponse { index: None, message: e.to_string() })?;
        if resp.distributions.len() != expected {
            return Err(Error::MalformedResponse {
                index: None,
                message: format!("expected {expected} distributions, got {}", resp.distributions.len()),
            });
        }
        resp.distributions
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let malformed = |message: String| Error::MalformedResponse { index: Some(i), message };
                match p.as_slice() {
                    [a, b, c] => ClassDistribution::new(*a, *b, *c).map_err(|e| malformed(e.to_string())),
                    _ => Err(malformed(format!("expected 3 probabilities, got {}", p.len()))),
                }
            })
            .collect()
    }

    pub fn encode_response(dists: &[ClassDistribution]) -> String {
        let resp = ClassifyResponse { distributions: dists.iter().map(|d| d.to_array().to_vec()).collect() };
        serde_json::to_string(&resp).expect("response serializes")
    }
}
