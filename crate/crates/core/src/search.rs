//! Inverted index over published ideas.
//!
//! Keyword search ranks with a field-weighted BM25: for each query term the
//! per-field frequencies are combined as `tf = 2.0*title + 1.5*tag + 1.0*body`
//! (boosts configurable), document length is the unweighted token count over
//! all fields, and
//!
//! ```text
//! idf(t)    = ln(1 + (N - df + 0.5) / (df + 0.5))
//! score(d)  = sum over distinct query terms t in d of
//!             idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len(d) / avglen))
//! ```
//!
//! Near-duplicate detection and similar-idea suggestions use TF-IDF cosine
//! similarity over the raw (unboosted) term counts of title, body and tags,
//! with smoothed `idf(t) = ln((N + 1) / (df + 1)) + 1`.
//!
//! Tokens are maximal runs of letters/digits, lowercased, at least two
//! characters long, minus the [`STOPWORDS`]. There is no stemming.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Idea, IdeaId, IdeaState, Tag};

/// Fixed English stopword list (30 words).
pub const STOPWORDS: [&str; 30] = [
    "a", "an", "and", "are", "as", "at", "be", "but", "by", "for", "from", "has", "have", "in",
    "is", "it", "its", "of", "on", "or", "that", "the", "this", "to", "was", "we", "were", "will",
    "with", "you",
];

fn is_stopword(token: &str) -> bool {
    STOPWORDS.binary_search(&token).is_ok()
}

pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|s| !s.is_empty())
        .map(str::to_lowercase)
        .filter(|t| t.chars().count() >= 2 && !is_stopword(t))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Field {
    Title,
    Body,
    Tag,
}

impl Field {
    const ALL: [Field; 3] = [Field::Title, Field::Body, Field::Tag];

    fn slot(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Posting {
    pub term: String,
    pub idea_id: IdeaId,
    pub term_frequency: u32,
    pub field: Field,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryResult {
    pub idea_id: IdeaId,
    pub score: f64,
    pub matched_terms: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
    pub title_boost: f64,
    pub body_boost: f64,
    pub tag_boost: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params { k1: 1.2, b: 0.75, title_boost: 2.0, body_boost: 1.0, tag_boost: 1.5 }
    }
}

impl Bm25Params {
    fn boost(&self, field: Field) -> f64 {
        match field {
            Field::Title => self.title_boost,
            Field::Body => self.body_boost,
            Field::Tag => self.tag_boost,
        }
    }
}

/// Similarity cut-off in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Threshold(f64);

impl Threshold {
    pub const DEFAULT_DUPLICATE: Threshold = Threshold(0.85);

    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value <= 1.0 {
            Ok(Threshold(value))
        } else {
            Err(Error::InvalidInput(format!("threshold {value} outside (0, 1]")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Threshold {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Threshold::new(v)
    }
}

impl From<Threshold> for f64 {
    fn from(t: Threshold) -> f64 {
        t.0
    }
}

/// Text of a not-yet-stored idea, as checked for duplicates.
#[derive(Debug, Clone, Copy)]
pub struct DraftText<'a> {
    pub title: &'a str,
    pub body: &'a str,
    pub tags: &'a BTreeSet<Tag>,
}

impl DraftText<'_> {
    fn field_tokens(&self) -> [Vec<String>; 3] {
        let tags = self.tags.iter().flat_map(|t| tokenize(t.as_str())).collect();
        [tokenize(self.title), tokenize(self.body), tags]
    }
}

impl<'a> From<&'a Idea> for DraftText<'a> {
    fn from(idea: &'a Idea) -> Self {
        DraftText { title: &idea.title, body: &idea.body, tags: &idea.tags }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
struct DocEntry {
    /// term -> frequency, per field slot.
    fields: [BTreeMap<String, u32>; 3],
    length: u64,
}

impl DocEntry {
    fn combined(&self) -> BTreeMap<&str, u32> {
        let mut out = BTreeMap::new();
        for f in &self.fields {
            for (t, &n) in f {
                *out.entry(t.as_str()).or_insert(0) += n;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchIndex {
    params: Bm25Params,
    docs: BTreeMap<IdeaId, DocEntry>,
    /// term -> idea -> per-field frequency.
    postings: BTreeMap<String, BTreeMap<IdeaId, [u32; 3]>>,
    total_length: u64,
}

impl SearchIndex {
    pub fn new(params: Bm25Params) -> Self {
        SearchIndex { params, ..Default::default() }
    }

    pub fn params(&self) -> &Bm25Params {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn contains(&self, id: IdeaId) -> bool {
        self.docs.contains_key(&id)
    }

    pub fn indexed_ids(&self) -> impl Iterator<Item = IdeaId> + '_ {
        self.docs.keys().copied()
    }

    pub fn document_frequency(&self, term: &str) -> usize {
        self.postings.get(term).map_or(0, BTreeMap::len)
    }

    pub fn postings(&self, term: &str) -> Vec<Posting> {
        let Some(list) = self.postings.get(term) else { return Vec::new() };
        list.iter()
            .flat_map(|(&idea_id, counts)| {
                Field::ALL.into_iter().filter_map(move |field| {
                    let n = counts[field.slot()];
                    (n > 0).then(|| Posting {
                        term: term.to_owned(),
                        idea_id,
                        term_frequency: n,
                        field,
                    })
                })
            })
            .collect()
    }

    /// Adds or replaces a published idea.
    pub fn index_idea(&mut self, idea: &Idea) -> Result<()> {
        if idea.state != IdeaState::Published {
            return Err(Error::IdeaNotPublished);
        }
        if self.docs.contains_key(&idea.idea_id) {
            self.remove_idea(idea.idea_id)?;
        }
        let mut entry = DocEntry::default();
        for (slot, tokens) in DraftText::from(idea).field_tokens().into_iter().enumerate() {
            entry.length += tokens.len() as u64;
            for t in tokens {
                *entry.fields[slot].entry(t).or_insert(0) += 1;
            }
        }
        for (slot, terms) in entry.fields.iter().enumerate() {
            for (t, &n) in terms {
                self.postings.entry(t.clone()).or_default().entry(idea.idea_id).or_default()[slot] = n;
            }
        }
        self.total_length += entry.length;
        self.docs.insert(idea.idea_id, entry);
        Ok(())
    }

    pub fn remove_idea(&mut self, id: IdeaId) -> Result<()> {
        let entry = self.docs.remove(&id).ok_or(Error::UnknownIdea)?;
        self.total_length -= entry.length;
        for terms in &entry.fields {
            for t in terms.keys() {
                if let Some(list) = self.postings.get_mut(t) {
                    list.remove(&id);
                    if list.is_empty() {
                        self.postings.remove(t);
                    }
                }
            }
        }
        Ok(())
    }

    fn bm25_idf(&self, term: &str) -> f64 {
        let n = self.docs.len() as f64;
        let df = self.document_frequency(term) as f64;
        (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
    }

    /// Ranked keyword search restricted to ideas accepted by `visible`.
    pub fn search(
        &self,
        query: &str,
        limit: usize,
        visible: impl Fn(IdeaId) -> bool,
    ) -> Vec<QueryResult> {
        let terms: BTreeSet<String> = tokenize(query).into_iter().collect();
        if terms.is_empty() || self.docs.is_empty() || limit == 0 {
            return Vec::new();
        }
        let avg_len = self.total_length as f64 / self.docs.len() as f64;
        let Bm25Params { k1, b, .. } = self.params;

        let mut hits: BTreeMap<IdeaId, QueryResult> = BTreeMap::new();
        for term in &terms {
            let Some(list) = self.postings.get(term) else { continue };
            let idf = self.bm25_idf(term);
            for (&id, counts) in list {
                if !visible(id) {
                    continue;
                }
                let tf: f64 = Field::ALL
                    .iter()
                    .map(|&f| self.params.boost(f) * f64::from(counts[f.slot()]))
                    .sum();
                let len = self.docs[&id].length as f64;
                let norm = if avg_len > 0.0 { 1.0 - b + b * len / avg_len } else { 1.0 };
                let contrib = idf * tf * (k1 + 1.0) / (tf + k1 * norm);
                let hit = hits.entry(id).or_insert_with(|| QueryResult {
                    idea_id: id,
                    score: 0.0,
                    matched_terms: BTreeSet::new(),
                });
                hit.score += contrib;
                hit.matched_terms.insert(term.clone());
            }
        }
        let mut out: Vec<QueryResult> = hits.into_values().collect();
        out.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.idea_id.cmp(&b.idea_id)));
        out.truncate(limit);
        out
    }

    fn tfidf_idf(&self, term: &str) -> f64 {
        let n = self.docs.len() as f64;
        let df = self.document_frequency(term) as f64;
        ((n + 1.0) / (df + 1.0)).ln() + 1.0
    }

    fn weigh(&self, counts: BTreeMap<&str, u32>) -> BTreeMap<String, f64> {
        counts
            .into_iter()
            .map(|(t, n)| (t.to_owned(), f64::from(n) * self.tfidf_idf(t)))
            .collect()
    }

    /// TF-IDF vector of arbitrary text against the current corpus statistics.
    pub fn tfidf_vector(&self, draft: DraftText<'_>) -> BTreeMap<String, f64> {
        let mut counts: BTreeMap<&str, u32> = BTreeMap::new();
        let fields = draft.field_tokens();
        for t in fields.iter().flatten() {
            *counts.entry(t.as_str()).or_insert(0) += 1;
        }
        self.weigh(counts)
    }

    fn doc_vector(&self, id: IdeaId) -> Option<BTreeMap<String, f64>> {
        self.docs.get(&id).map(|d| self.weigh(d.combined()))
    }

    /// Ideas sharing at least one term with `vector`, scored by cosine.
    fn cosine_candidates(
        &self,
        vector: &BTreeMap<String, f64>,
        exclude: Option<IdeaId>,
    ) -> Vec<(IdeaId, f64)> {
        let mut candidates = BTreeSet::new();
        for t in vector.keys() {
            if let Some(list) = self.postings.get(t) {
                candidates.extend(list.keys().copied());
            }
        }
        if let Some(x) = exclude {
            candidates.remove(&x);
        }
        candidates
            .into_iter()
            .filter_map(|id| {
                let other = self.doc_vector(id)?;
                Some((id, cosine(vector, &other)))
            })
            .collect()
    }

    /// Published ideas whose similarity to the draft is at least `threshold`,
    /// most similar first.
    pub fn find_duplicates(&self, draft: DraftText<'_>, threshold: Threshold) -> Vec<(IdeaId, f64)> {
        let vector = self.tfidf_vector(draft);
        let mut out: Vec<(IdeaId, f64)> = self
            .cosine_candidates(&vector, None)
            .into_iter()
            .filter(|&(_, s)| s >= threshold.get())
            .collect();
        sort_by_score(&mut out);
        out
    }

    /// Indexed ideas most similar to `id` (excluding itself and zero scores),
    /// filtered by `visible`, at most `k`.
    pub fn similar(
        &self,
        id: IdeaId,
        k: usize,
        visible: impl Fn(IdeaId) -> bool,
    ) -> Result<Vec<(IdeaId, f64)>> {
        let vector = self.doc_vector(id).ok_or(Error::UnknownIdea)?;
        let mut out: Vec<(IdeaId, f64)> = self
            .cosine_candidates(&vector, Some(id))
            .into_iter()
            .filter(|&(other, s)| s > 0.0 && visible(other))
            .collect();
        sort_by_score(&mut out);
        out.truncate(k);
        Ok(out)
    }
}

fn sort_by_score(v: &mut [(IdeaId, f64)]) {
    v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
}

/// Cosine similarity of two sparse non-negative vectors, clamped to `[0, 1]`.
/// Zero vectors have similarity 0 with everything.
pub fn cosine(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let dot: f64 = small
        .iter()
        .filter_map(|(t, x)| large.get(t).map(|y| x * y))
        .sum();
    let na: f64 = a.values().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.values().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na * nb)).clamp(0.0, 1.0)
}
