//! Shared fixtures and brute-force oracles for the integration tests.
//!
//! The oracles deliberately avoid the library's own data structures: they
//! tokenize raw text again, scan every document in full and count with
//! plain loops.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use ideaforge::api::{self, AppState};
use ideaforge::service::{AuthSettings, Service};
use ideaforge_core::{Clock, GroupId, Idea, IdeaId, IdeaState, ManualClock, PlatformConfig, UserId, Visibility};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tower::ServiceExt;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// -------------------------------------------------------------------------
// text
// -------------------------------------------------------------------------

pub const VOCAB: [&str; 32] = [
    "solar", "water", "pump", "farm", "school", "bike", "river", "clinic", "market", "bridge", "garden",
    "library", "waste", "compost", "battery", "wind", "sensor", "drone", "bread", "rail", "shelter", "lamp",
    "well", "forest", "seed", "radio", "kiln", "loom", "ferry", "canal", "roof", "stove",
];

const ORACLE_STOPWORDS: &str = "a an and are as at be but by for from has have in is it its of on or that the this to was we were will with you";

pub fn words(rng: &mut impl Rng, n: usize) -> Vec<&'static str> {
    (0..n).map(|_| *VOCAB.choose(rng).expect("non-empty")).collect()
}

/// Splits on anything that is not a letter or digit, lowercases, and drops
/// one-character tokens and stopwords.
pub fn oracle_tokens(text: &str) -> Vec<String> {
    let stop: Vec<&str> = ORACLE_STOPWORDS.split(' ').collect();
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars().chain(std::iter::once(' ')) {
        if ch.is_alphanumeric() {
            cur.push(ch);
        } else if !cur.is_empty() {
            let t = cur.to_lowercase();
            if t.chars().count() > 1 && !stop.contains(&t.as_str()) {
                out.push(t);
            }
            cur.clear();
        }
    }
    out
}

/// Token lists of one idea, per field.
#[derive(Debug, Clone)]
pub struct OracleDoc {
    pub id: IdeaId,
    pub title: Vec<String>,
    pub body: Vec<String>,
    pub tags: Vec<String>,
}

impl OracleDoc {
    pub fn of(idea: &Idea) -> Self {
        OracleDoc {
            id: idea.idea_id,
            title: oracle_tokens(&idea.title),
            body: oracle_tokens(&idea.body),
            tags: idea.tags.iter().flat_map(|t| oracle_tokens(t.as_str())).collect(),
        }
    }

    pub fn from_text(id: u64, title: &str, body: &str, tags: &[&str]) -> Self {
        OracleDoc {
            id: IdeaId(id),
            title: oracle_tokens(title),
            body: oracle_tokens(body),
            tags: tags.iter().flat_map(|t| oracle_tokens(t)).collect(),
        }
    }

    pub fn all(&self) -> Vec<&String> {
        self.title.iter().chain(&self.body).chain(&self.tags).collect()
    }

    pub fn count(&self, t: &str) -> usize {
        self.all().into_iter().filter(|x| *x == t).count()
    }

    pub fn contains(&self, t: &str) -> bool {
        self.count(t) > 0
    }
}

fn count_in(list: &[String], t: &str) -> f64 {
    list.iter().filter(|x| *x == t).count() as f64
}

/// Full-scan BM25 over `corpus` with title x2, tag x1.5, body x1 boosts.
pub fn bm25_oracle(corpus: &[OracleDoc], query: &str) -> BTreeMap<IdeaId, f64> {
    let (k1, b) = (1.2, 0.75);
    let mut terms = oracle_tokens(query);
    terms.sort();
    terms.dedup();
    let n = corpus.len() as f64;
    let total: usize = corpus.iter().map(|d| d.all().len()).sum();
    let avg = total as f64 / n;
    let mut out = BTreeMap::new();
    for d in corpus {
        let mut score = 0.0;
        let mut matched = false;
        for t in &terms {
            let df = corpus.iter().filter(|o| o.contains(t)).count() as f64;
            let tf = 2.0 * count_in(&d.title, t) + 1.5 * count_in(&d.tags, t) + count_in(&d.body, t);
            if tf == 0.0 {
                continue;
            }
            matched = true;
            let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
            let len = d.all().len() as f64;
            score += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * len / avg));
        }
        if matched {
            out.insert(d.id, score);
        }
    }
    out
}

/// Dense TF-IDF cosine between `draft` and every document of `corpus`, with
/// `idf = ln((N+1)/(df+1)) + 1` over the corpus.
pub fn tfidf_oracle(corpus: &[OracleDoc], draft: &OracleDoc) -> BTreeMap<IdeaId, f64> {
    let mut vocab: Vec<String> = corpus.iter().chain(std::iter::once(draft)).flat_map(|d| d.all()).cloned().collect();
    vocab.sort();
    vocab.dedup();
    let n = corpus.len() as f64;
    let idf: Vec<f64> = vocab
        .iter()
        .map(|t| {
            let df = corpus.iter().filter(|d| d.contains(t)).count() as f64;
            ((n + 1.0) / (df + 1.0)).ln() + 1.0
        })
        .collect();
    let dense = |d: &OracleDoc| -> Vec<f64> { vocab.iter().zip(&idf).map(|(t, w)| d.count(t) as f64 * w).collect() };
    let q = dense(draft);
    let qn = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    corpus
        .iter()
        .map(|d| {
            let v = dense(d);
            let dot: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
            let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let s = if qn == 0.0 || vn == 0.0 { 0.0 } else { (dot / (qn * vn)).clamp(0.0, 1.0) };
            (d.id, s)
        })
        .collect()
}

/// |A ∩ B| / |A ∪ B| by counting, 0 for two empty sets.
pub fn jaccard_oracle<T: PartialEq>(a: &[T], b: &[T]) -> f64 {
    let mut union: Vec<&T> = Vec::new();
    for x in a.iter().chain(b) {
        if !union.contains(&x) {
            union.push(x);
        }
    }
    if union.is_empty() {
        return 0.0;
    }
    let inter = union.iter().filter(|x| a.contains(x) && b.contains(x)).count();
    inter as f64 / union.len() as f64
}

/// Who may read an idea, written out case by case.
pub fn visible_oracle(idea: &Idea, viewer: Option<UserId>, group: GroupId, team: &BTreeSet<UserId>) -> bool {
    let g = group.get();
    if viewer == Some(idea.author_id) {
        return true;
    }
    if (1..=3).contains(&g) && viewer.is_some() {
        return true;
    }
    if idea.state != IdeaState::Published {
        return false;
    }
    match idea.visibility {
        Visibility::Public => true,
        Visibility::Team => viewer.is_some_and(|v| team.contains(&v)),
        Visibility::Private => false,
    }
}

// -------------------------------------------------------------------------
// in-process service
// -------------------------------------------------------------------------

pub struct TestApp {
    pub dir: tempfile::TempDir,
    pub state: AppState,
    pub router: Router,
}

pub fn fast_auth() -> AuthSettings {
    AuthSettings { password_rounds: 1, ..AuthSettings::default() }
}

impl TestApp {
    pub fn new() -> Self {
        Self::with_clock(Arc::new(ManualClock::ticking()))
    }

    pub fn with_clock(clock: Arc<dyn Clock>) -> Self {
        let dir = tempfile::tempdir().expect("tempdir");
        let svc = Service::open(dir.path(), PlatformConfig::default(), fast_auth(), clock, Some(42)).expect("open");
        let state = AppState::new(svc);
        let router = api::router(state.clone());
        TestApp { dir, state, router }
    }

    pub async fn call(&self, method: &str, path: &str, token: Option<&str>, body: Option<&str>) -> (StatusCode, Value) {
        self.call_with(method, path, token, body, &[]).await
    }

    pub async fn call_with(
        &self,
        method: &str,
        path: &str,
        token: Option<&str>,
        body: Option<&str>,
        headers: &[(&str, &str)],
    ) -> (StatusCode, Value) {
        let mut req = Request::builder().method(method).uri(path);
        if let Some(t) = token {
            req = req.header("authorization", format!("Bearer {t}"));
        }
        for (k, v) in headers {
            req = req.header(*k, *v);
        }
        let req = match body {
            Some(b) => req.header("content-type", "application/json").body(Body::from(b.to_owned())),
            None => req.body(Body::empty()),
        }
        .expect("request");
        let resp = self.router.clone().oneshot(req).await.expect("infallible");
        let status = resp.status();
        let bytes = resp.into_body().collect().await.expect("body").to_bytes();
        let value = if bytes.is_empty() {
            Value::Null
        } else {
            serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into_owned()))
        };
        (status, value)
    }

    /// Registers an account and returns (user id, token).
    pub async fn sign_up(&self, name: &str, email: &str) -> (u64, String) {
        let body = format!(r#"{{"display_name":"{name}","email":"{email}","password":"password-{name}"}}"#);
        let (s, v) = self.call("POST", "/api/v1/users", None, Some(&body)).await;
        assert_eq!(s, StatusCode::CREATED, "{v}");
        let id = v["user_id"].as_u64().expect("user_id");
        (id, self.sign_in(email, &format!("password-{name}")).await)
    }

    pub async fn sign_in(&self, email: &str, password: &str) -> String {
        let body = format!(r#"{{"email":"{email}","password":"{password}"}}"#);
        let (s, v) = self.call("POST", "/api/v1/sessions", None, Some(&body)).await;
        assert_eq!(s, StatusCode::CREATED, "{v}");
        v["token"].as_str().expect("token").to_owned()
    }

    /// Creates the Administrator and returns (user id, token).
    pub async fn admin(&self) -> (u64, String) {
        let st = self.state.clone();
        let (u, _) = st
            .write(|s| s.ensure_admin("admin@example.org", "Admin", "admin-password"))
            .await
            .expect("admin");
        (u.user_id.0, self.sign_in("admin@example.org", "admin-password").await)
    }
}

impl Default for TestApp {
    fn default() -> Self {
        Self::new()
    }
}
