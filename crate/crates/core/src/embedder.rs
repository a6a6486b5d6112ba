//! Sentence vectors: a built-in TF-IDF embedder, a client for remote embedding
//! servers, and cosine similarity.

use std::collections::BTreeMap;
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::SegmentedDoc;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("cannot fit a lexical model: {0}")]
    EmptyCorpus(&'static str),
    #[error("vector dimensions differ: {0} vs {1}")]
    DimsMismatch(usize, usize),
    #[error("embedding endpoint {endpoint} failed on batch {batch}: {reason}")]
    Transport {
        endpoint: String,
        batch: usize,
        reason: String,
    },
    #[error("embedding protocol violation from {endpoint}: {reason}")]
    Protocol { endpoint: String, reason: String },
}

/// A sentence vector, either sparse `(index, value)` pairs sorted by index or dense.
#[derive(Clone, Debug, PartialEq)]
pub enum Vector {
    Sparse { dims: usize, entries: Vec<(usize, f64)> },
    Dense(Vec<f64>),
}

impl Vector {
    pub fn dims(&self) -> usize {
        match self {
            Vector::Sparse { dims, .. } => *dims,
            Vector::Dense(v) => v.len(),
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            Vector::Sparse { entries, .. } => entries.iter().map(|(_, x)| x * x).sum::<f64>().sqrt(),
            Vector::Dense(v) => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Vector::Sparse { entries, .. } => entries.iter().all(|&(_, x)| x == 0.0),
            Vector::Dense(v) => v.iter().all(|&x| x == 0.0),
        }
    }

    pub fn scaled(&self, factor: f64) -> Vector {
        match self {
            Vector::Sparse { dims, entries } => Vector::Sparse {
                dims: *dims,
                entries: entries.iter().map(|&(i, x)| (i, x * factor)).collect(),
            },
            Vector::Dense(v) => Vector::Dense(v.iter().map(|x| x * factor).collect()),
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        match self {
            Vector::Sparse { dims, entries } => {
                let mut out = vec![0.0; *dims];
                for &(i, x) in entries {
                    out[i] = x;
                }
                out
            }
            Vector::Dense(v) => v.clone(),
        }
    }

    fn dot(&self, other: &Vector) -> f64 {
        match (self, other) {
            (Vector::Sparse { entries: a, .. }, Vector::Sparse { entries: b, .. }) => {
                let (mut i, mut j, mut acc) = (0, 0, 0.0);
                while i < a.len() && j < b.len() {
                    match a[i].0.cmp(&b[j].0) {
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Equal => {
                            acc += a[i].1 * b[j].1;
                            i += 1;
                            j += 1;
                        }
                    }
                }
                acc
            }
            (Vector::Dense(a), Vector::Dense(b)) => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            (Vector::Sparse { entries, .. }, Vector::Dense(d))
            | (Vector::Dense(d), Vector::Sparse { entries, .. }) => {
                entries.iter().map(|&(i, x)| x * d[i]).sum()
            }
        }
    }
}

/// Cosine similarity, clamped to [-1, 1]. A zero vector on either side gives 0.
pub fn cosine(a: &Vector, b: &Vector) -> Result<f64, EmbedError> {
    if a.dims() != b.dims() {
        return Err(EmbedError::DimsMismatch(a.dims(), b.dims()));
    }
    let denom = a.norm() * b.norm();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok((a.dot(b) / denom).clamp(-1.0, 1.0))
}

/// TF-IDF vocabulary and smoothed inverse document frequencies, where every
/// sentence counts as one document: `idf(t) = ln((1 + n) / (1 + df(t))) + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LexicalModel {
    vocabulary: BTreeMap<String, usize>,
    idf: Vec<f64>,
    doc_count: usize,
}

impl LexicalModel {
    pub fn fit<S: AsRef<str>>(sentences: &[Vec<S>]) -> Result<Self, EmbedError> {
        if sentences.is_empty() {
            return Err(EmbedError::EmptyCorpus("no sentences"));
        }
        let mut df: BTreeMap<String, usize> = BTreeMap::new();
        for sentence in sentences {
            let mut terms: Vec<&str> = sentence.iter().map(AsRef::as_ref).collect();
            terms.sort_unstable();
            terms.dedup();
            for t in terms {
                *df.entry(t.to_owned()).or_insert(0) += 1;
            }
        }
        if df.is_empty() {
            return Err(EmbedError::EmptyCorpus("every sentence is empty"));
        }
        let n = sentences.len() as f64;
        let mut vocabulary = BTreeMap::new();
        let mut idf = Vec::with_capacity(df.len());
        for (i, (term, count)) in df.into_iter().enumerate() {
            idf.push(((1.0 + n) / (1.0 + count as f64)).ln() + 1.0);
            vocabulary.insert(term, i);
        }
        Ok(LexicalModel {
            vocabulary,
            idf,
            doc_count: sentences.len(),
        })
    }

    pub fn dims(&self) -> usize {
        self.idf.len()
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.vocabulary.get(term).copied()
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.index_of(term).map(|i| self.idf[i])
    }

    /// L2-normalized tf·idf vector; out-of-vocabulary terms are ignored.
    pub fn embed<S: AsRef<str>>(&self, tokens: &[S]) -> Vector {
        let mut tf: BTreeMap<usize, f64> = BTreeMap::new();
        for t in tokens {
            if let Some(i) = self.index_of(t.as_ref()) {
                *tf.entry(i).or_insert(0.0) += 1.0;
            }
        }
        let mut entries: Vec<(usize, f64)> = tf.into_iter().map(|(i, c)| (i, c * self.idf[i])).collect();
        let norm = entries.iter().map(|(_, x)| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            for e in &mut entries {
                e.1 /= norm;
            }
        }
        Vector::Sparse {
            dims: self.dims(),
            entries,
        }
    }
}

pub fn fit_lexical<S: AsRef<str>>(sentences: &[Vec<S>]) -> Result<LexicalModel, EmbedError> {
    LexicalModel::fit(sentences)
}

pub fn embed_lexical<S: AsRef<str>>(model: &LexicalModel, sentence: &[S]) -> Vector {
    model.embed(sentence)
}

/// Produces a claim vector and one vector per article sentence in a shared space.
pub trait SentenceEncoder: Sync {
    fn encode(&self, claim: &SegmentedDoc, article: &SegmentedDoc) -> Result<(Vector, Vec<Vector>), EmbedError>;

    /// Short label recorded in configuration fingerprints.
    fn label(&self) -> String;
}

/// TF-IDF encoder fit per article on its sentences plus the claim.
#[derive(Clone, Copy, Debug, Default)]
pub struct LexicalEncoder;

impl SentenceEncoder for LexicalEncoder {
    fn encode(&self, claim: &SegmentedDoc, article: &SegmentedDoc) -> Result<(Vector, Vec<Vector>), EmbedError> {
        let mut docs: Vec<Vec<&str>> = (0..article.sentence_count())
            .map(|i| article.sentence_words(i).iter().map(String::as_str).collect())
            .collect();
        docs.push(claim.words().iter().map(String::as_str).collect());
        let model = LexicalModel::fit(&docs)?;
        let claim_vec = model.embed(claim.words());
        let sentence_vecs = docs[..docs.len() - 1].iter().map(|s| model.embed(s)).collect();
        Ok((claim_vec, sentence_vecs))
    }

    fn label(&self) -> String {
        "lexical-tfidf(smooth-idf,l2)".to_owned()
    }
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [String],
}

#[derive(Deserialize)]
struct EmbedResponse {
    dims: usize,
    vectors: Vec<Vec<f64>>,
}

/// Blocking client for the `POST /embed` protocol.
#[derive(Clone, Debug)]
pub struct RemoteEmbedder {
    endpoint: String,
    pub batch_size: usize,
    pub retries: usize,
    pub max_in_flight: usize,
    pub backoff: Duration,
    pub timeout: Duration,
}

impl RemoteEmbedder {
    pub fn new(endpoint: impl Into<String>) -> Self {
        RemoteEmbedder {
            endpoint: endpoint.into().trim_end_matches('/').to_owned(),
            batch_size: 32,
            retries: 2,
            max_in_flight: 4,
            backoff: Duration::from_millis(100),
            timeout: Duration::from_secs(60),
        }
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    /// Embeds `texts` in batches, at most `max_in_flight` concurrently;
    /// output order matches input order.
    pub fn embed(&self, texts: &[String]) -> Result<Vec<Vector>, EmbedError> {
        if texts.is_empty() {
            return Ok(Vec::new());
        }
        let batches: Vec<&[String]> = texts.chunks(self.batch_size.max(1)).collect();
        let results: Mutex<Vec<Option<Result<Vec<Vec<f64>>, EmbedError>>>> =
            Mutex::new((0..batches.len()).map(|_| None).collect());
        let next = Mutex::new(0usize);
        let agent = http_agent(self.timeout);

        thread::scope(|scope| {
            for _ in 0..self.max_in_flight.max(1).min(batches.len()) {
                scope.spawn(|| loop {
                    let idx = {
                        let mut n = next.lock().unwrap();
                        let idx = *n;
                        *n += 1;
                        idx
                    };
                    let Some(batch) = batches.get(idx) else { break };
                    let res = self.embed_batch(&agent, idx, batch);
                    results.lock().unwrap()[idx] = Some(res);
                });
            }
        });

        let mut out = Vec::with_capacity(texts.len());
        let mut dims = None;
        for res in results.into_inner().unwrap() {
            for v in res.expect("every batch is processed")? {
                if *dims.get_or_insert(v.len()) != v.len() {
                    return Err(self.protocol("vector dims differ across batches".into()));
                }
                out.push(Vector::Dense(v));
            }
        }
        Ok(out)
    }

    fn embed_batch(&self, agent: &ureq::Agent, batch: usize, texts: &[String]) -> Result<Vec<Vec<f64>>, EmbedError> {
        let url = format!("{}/embed", self.endpoint);
        let body = EmbedRequest { texts };
        let resp: EmbedResponse = with_retries(self.retries, self.backoff, || {
            agent
                .post(&url)
                .send_json(&body)
                .and_then(|mut r| r.body_mut().read_json::<EmbedResponse>())
        })
        .map_err(|e| EmbedError::Transport {
            endpoint: self.endpoint.clone(),
            batch,
            reason: e.to_string(),
        })?;
        if resp.vectors.len() != texts.len() {
            return Err(self.protocol(format!(
                "batch {batch}: {} vectors for {} texts",
                resp.vectors.len(),
                texts.len()
            )));
        }
        if let Some(bad) = resp.vectors.iter().find(|v| v.len() != resp.dims) {
            return Err(self.protocol(format!(
                "batch {batch}: vector of length {} but dims = {}",
                bad.len(),
                resp.dims
            )));
        }
        if resp.vectors.iter().flatten().any(|x| !x.is_finite()) {
            return Err(self.protocol(format!("batch {batch}: non-finite coefficient")));
        }
        Ok(resp.vectors)
    }

    fn protocol(&self, reason: String) -> EmbedError {
        EmbedError::Protocol {
            endpoint: self.endpoint.clone(),
            reason,
        }
    }
}

impl SentenceEncoder for RemoteEmbedder {
    fn encode(&self, claim: &SegmentedDoc, article: &SegmentedDoc) -> Result<(Vector, Vec<Vector>), EmbedError> {
        let mut texts = vec![claim.text().to_owned()];
        texts.extend((0..article.sentence_count()).map(|i| article.sentence_text(i).to_owned()));
        let mut vectors = self.embed(&texts)?;
        let claim_vec = vectors.remove(0);
        Ok((claim_vec, vectors))
    }

    fn label(&self) -> String {
        format!("remote({})", self.endpoint)
    }
}

pub(crate) fn http_agent(timeout: Duration) -> ureq::Agent {
    ureq::Agent::config_builder()
        .timeout_global(Some(timeout))
        .build()
        .into()
}

/// Runs `op` up to `1 + retries` times with exponential backoff.
pub(crate) fn with_retries<T, E>(retries: usize, backoff: Duration, mut op: impl FnMut() -> Result<T, E>) -> Result<T, E> {
    let mut attempt = 0;
    loop {
        match op() {
            Ok(v) => return Ok(v),
            Err(e) if attempt >= retries => return Err(e),
            Err(_) => {
                thread::sleep(backoff * 2u32.saturating_pow(attempt as u32));
                attempt += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sents(lines: &[&str]) -> Vec<Vec<String>> {
        lines
            .iter()
            .map(|l| l.split_whitespace().map(str::to_owned).collect())
            .collect()
    }

    #[test]
    fn single_sentence_has_equal_idf() {
        let m = fit_lexical(&sents(&["a b c"])).unwrap();
        let idfs: Vec<f64> = ["a", "b", "c"].iter().map(|t| m.idf(t).unwrap()).collect();
        assert!(idfs.iter().all(|&x| x == idfs[0]));
        assert_eq!(idfs[0], 1.0);
    }

    #[test]
    fn common_terms_get_lower_idf() {
        let m = fit_lexical(&sents(&["the cat", "the dog", "the bird"])).unwrap();
        assert!(m.idf("the").unwrap() < m.idf("cat").unwrap());
    }

    #[test]
    fn five_sentence_idf_matches_hand_values() {
        // df: the=4, cat=2, sat=1, dog=2, ran=1, fast=1, a=1
        let m = fit_lexical(&sents(&["the cat sat", "the dog ran", "the cat", "a dog", "the fast"])).unwrap();
        let expect = |df: f64| (6.0f64 / (1.0 + df)).ln() + 1.0;
        assert!((m.idf("the").unwrap() - expect(4.0)).abs() < 1e-12);
        assert!((m.idf("cat").unwrap() - expect(2.0)).abs() < 1e-12);
        assert!((m.idf("sat").unwrap() - expect(1.0)).abs() < 1e-12);
        assert_eq!(m.dims(), 7);
        // lexicographic index order
        assert_eq!(m.index_of("a"), Some(0));
        assert_eq!(m.index_of("the"), Some(6));
    }

    #[test]
    fn fixture_sentence_coefficients() {
        let m = fit_lexical(&sents(&["the cat sat", "the dog ran", "the cat", "a dog", "the fast"])).unwrap();
        let v = m.embed(&["the", "cat", "cat"]);
        let the = (6.0f64 / 5.0).ln() + 1.0;
        let cat = 2.0 * ((6.0f64 / 3.0).ln() + 1.0);
        let norm = (the * the + cat * cat).sqrt();
        let dense = v.to_dense();
        assert!((dense[m.index_of("the").unwrap()] - the / norm).abs() < 1e-12);
        assert!((dense[m.index_of("cat").unwrap()] - cat / norm).abs() < 1e-12);
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_errors() {
        assert!(fit_lexical::<String>(&[]).is_err());
        assert!(fit_lexical::<String>(&[vec![], vec![]]).is_err());
    }

    #[test]
    fn single_term_is_unit_axis() {
        let m = fit_lexical(&sents(&["x y", "y z"])).unwrap();
        let v = m.embed(&["z"]);
        let mut expect = vec![0.0; 3];
        expect[m.index_of("z").unwrap()] = 1.0;
        assert_eq!(v.to_dense(), expect);
        assert!(m.embed(&["unknown"]).is_zero());
    }

    #[test]
    fn idf_is_order_insensitive() {
        let a = fit_lexical(&sents(&["a b", "b c", "c d e"])).unwrap();
        let b = fit_lexical(&sents(&["c d e", "a b", "b c"])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cosine_cases() {
        let v = Vector::Dense(vec![1.0, 2.0, 3.0]);
        assert!((cosine(&v, &v).unwrap() - 1.0).abs() < 1e-12);
        assert!((cosine(&v, &v.scaled(2.0)).unwrap() - 1.0).abs() < 1e-12);
        let e1 = Vector::Dense(vec![1.0, 0.0]);
        let e2 = Vector::Sparse { dims: 2, entries: vec![(1, 1.0)] };
        assert_eq!(cosine(&e1, &e2).unwrap(), 0.0);
        assert_eq!(cosine(&e1, &Vector::Dense(vec![0.0, 0.0])).unwrap(), 0.0);
        assert!(matches!(
            cosine(&e1, &Vector::Dense(vec![1.0])),
            Err(EmbedError::DimsMismatch(2, 1))
        ));
        let s = Vector::Sparse { dims: 3, entries: vec![(0, 1.0), (2, 3.0)] };
        let d = Vector::Dense(vec![1.0, 0.0, 3.0]);
        assert!((cosine(&s, &d).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn retries_stop_after_limit() {
        let mut calls = 0;
        let res: Result<(), &str> = with_retries(2, Duration::from_millis(1), || {
            calls += 1;
            Err("nope")
        });
        assert!(res.is_err());
        assert_eq!(calls, 3);
    }
}
