//! Claim/article/verdict triples: loading, validation, segmentation and splits.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{SegmentedDoc, TextPipeline};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: malformed record: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: field `{field}` is empty")]
    EmptyField { line: usize, field: &'static str },
    #[error("line {line}: duplicate id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("corpus has {0} triples, at least 3 are needed for a split")]
    TooSmallToSplit(usize),
    #[error("split ratios {0:?} must be positive and sum to 1")]
    BadRatios((f64, f64, f64)),
    #[error("unknown triple id `{0}`")]
    UnknownId(String),
}

/// One claim/article/verdict record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triple {
    pub id: String,
    pub dataset: String,
    pub claim: String,
    pub article: String,
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth_label: Option<String>,
}

/// Which text of a triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Article,
    Claim,
    Verdict,
}

impl Field {
    pub const ALL: [Field; 3] = [Field::Article, Field::Claim, Field::Verdict];

    pub fn as_str(self) -> &'static str {
        match self {
            Field::Article => "article",
            Field::Claim => "claim",
            Field::Verdict => "verdict",
        }
    }
}

impl std::str::FromStr for Field {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "article" => Ok(Field::Article),
            "claim" => Ok(Field::Claim),
            "verdict" => Ok(Field::Verdict),
            other => Err(format!("unknown field `{other}`")),
        }
    }
}

/// Segmentations of the three texts of one triple.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentedTriple {
    pub claim: SegmentedDoc,
    pub article: SegmentedDoc,
    pub verdict: SegmentedDoc,
}

impl SegmentedTriple {
    pub fn get(&self, field: Field) -> &SegmentedDoc {
        match field {
            Field::Article => &self.article,
            Field::Claim => &self.claim,
            Field::Verdict => &self.verdict,
        }
    }

    fn get_mut(&mut self, field: Field) -> &mut SegmentedDoc {
        match field {
            Field::Article => &mut self.article,
            Field::Claim => &mut self.claim,
            Field::Verdict => &mut self.verdict,
        }
    }
}

/// An immutable, validated set of triples with their segmentations.
///
/// Each text is segmented exactly once, when the corpus is built.
#[derive(Clone, Debug)]
pub struct Corpus {
    name: String,
    triples: Vec<Triple>,
    segmented: Vec<SegmentedTriple>,
    index: HashMap<String, usize>,
    pipeline: TextPipeline,
}

#[derive(Deserialize)]
struct RawRecord {
    #[serde(default)]
    id: Option<String>,
    #[serde(default)]
    dataset: Option<String>,
    claim: String,
    article: String,
    verdict: String,
    #[serde(default)]
    truth_label: Option<String>,
}

impl Corpus {
    /// Validates and segments `triples`. Errors cite 1-based record positions.
    pub fn from_triples(
        name: impl Into<String>,
        triples: Vec<Triple>,
        pipeline: &TextPipeline,
    ) -> Result<Self, CorpusError> {
        let mut index = HashMap::with_capacity(triples.len());
        for (i, t) in triples.iter().enumerate() {
            let line = i + 1;
            for (field, value) in [("claim", &t.claim), ("article", &t.article), ("verdict", &t.verdict)] {
                if value.trim().is_empty() {
                    return Err(CorpusError::EmptyField { line, field });
                }
            }
            if index.insert(t.id.clone(), i).is_some() {
                return Err(CorpusError::DuplicateId {
                    line,
                    id: t.id.clone(),
                });
            }
        }
        let segmented = triples
            .par_iter()
            .map(|t| SegmentedTriple {
                claim: pipeline.segment(&t.claim),
                article: pipeline.segment(&t.article),
                verdict: pipeline.segment(&t.verdict),
            })
            .collect();
        Ok(Corpus {
            name: name.into(),
            triples,
            segmented,
            index,
            pipeline: pipeline.clone(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn pipeline(&self) -> &TextPipeline {
        &self.pipeline
    }

    pub fn segmented(&self, i: usize) -> &SegmentedTriple {
        &self.segmented[i]
    }

    /// Triples paired with their segmentations, in corpus order.
    pub fn iter(&self) -> impl Iterator<Item = (&Triple, &SegmentedTriple)> {
        self.triples.iter().zip(&self.segmented)
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn get(&self, id: &str) -> Option<(&Triple, &SegmentedTriple)> {
        self.position(id).map(|i| (&self.triples[i], &self.segmented[i]))
    }

    /// Distinct dataset tags, sorted.
    pub fn datasets(&self) -> Vec<String> {
        let mut tags: Vec<String> = self
            .triples
            .iter()
            .map(|t| t.dataset.clone())
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        tags.sort();
        tags
    }

    /// The sub-corpus of one dataset tag.
    pub fn filter_dataset(&self, dataset: &str) -> Corpus {
        self.select(|t| t.dataset == dataset, format!("{}:{}", self.name, dataset))
    }

    fn select(&self, keep: impl Fn(&Triple) -> bool, name: String) -> Corpus {
        let picks: Vec<usize> = (0..self.len()).filter(|&i| keep(&self.triples[i])).collect();
        self.subset(&picks, name)
    }

    fn subset(&self, picks: &[usize], name: String) -> Corpus {
        let triples: Vec<Triple> = picks.iter().map(|&i| self.triples[i].clone()).collect();
        let segmented = picks.iter().map(|&i| self.segmented[i].clone()).collect();
        let index = triples.iter().enumerate().map(|(i, t)| (t.id.clone(), i)).collect();
        Corpus {
            name,
            triples,
            segmented,
            index,
            pipeline: self.pipeline.clone(),
        }
    }

    /// Mean number of verdict sentences.
    pub fn mean_verdict_sentences(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let total: usize = self.segmented.iter().map(|s| s.verdict.sentence_count()).sum();
        total as f64 / self.len() as f64
    }

    /// Replaces subword estimates with exact counts from a sidecar.
    pub fn apply_subword_counts(&mut self, counts: &SubwordCounts) -> Result<(), CorpusError> {
        for ((id, field), &count) in &counts.0 {
            let pos = self.position(id).ok_or_else(|| CorpusError::UnknownId(id.clone()))?;
            self.segmented[pos].get_mut(*field).set_subword_count(count);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorpusFormat {
    Jsonl,
}

/// Loads a JSONL corpus. The corpus name is the file stem; it is also the
/// dataset tag of records that carry none.
pub fn load_corpus(
    path: &Path,
    format: CorpusFormat,
    pipeline: &TextPipeline,
) -> Result<Corpus, CorpusError> {
    let CorpusFormat::Jsonl = format;
    let content = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".to_owned());
    parse_jsonl(&content, &name, pipeline)
}

/// Parses JSONL records. Blank lines are skipped but still counted for line numbers.
pub fn parse_jsonl(content: &str, name: &str, pipeline: &TextPipeline) -> Result<Corpus, CorpusError> {
    let mut triples = Vec::new();
    let mut lines = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in content.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let rec: RawRecord = serde_json::from_str(raw).map_err(|e| CorpusError::Malformed {
            line,
            reason: e.to_string(),
        })?;
        for (field, value) in [("claim", &rec.claim), ("article", &rec.article), ("verdict", &rec.verdict)] {
            if value.trim().is_empty() {
                return Err(CorpusError::EmptyField { line, field });
            }
        }
        let dataset = rec.dataset.unwrap_or_else(|| name.to_owned());
        let id = rec.id.unwrap_or_else(|| format!("{dataset}-{line}"));
        if !seen.insert(id.clone()) {
            return Err(CorpusError::DuplicateId { line, id });
        }
        triples.push(Triple {
            id,
            dataset,
            claim: rec.claim,
            article: rec.article,
            verdict: rec.verdict,
            truth_label: rec.truth_label,
        });
        lines.push(line);
    }
    Corpus::from_triples(name, triples, pipeline).map_err(|e| match e {
        // translate record positions back to file lines
        CorpusError::EmptyField { line, field } => CorpusError::EmptyField { line: lines[line - 1], field },
        CorpusError::DuplicateId { line, id } => CorpusError::DuplicateId { line: lines[line - 1], id },
        other => other,
    })
}

/// Exact subword counts keyed by (triple id, field).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubwordCounts(pub HashMap<(String, Field), usize>);

#[derive(Deserialize)]
struct SubwordRecord {
    id: String,
    field: String,
    count: usize,
}

/// Loads a sidecar of `{id, field, count}` lines.
pub fn load_subword_counts(path: &Path) -> Result<SubwordCounts, CorpusError> {
    let content = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut map = HashMap::new();
    for (i, raw) in content.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let line = i + 1;
        let rec: SubwordRecord = serde_json::from_str(raw).map_err(|e| CorpusError::Malformed {
            line,
            reason: e.to_string(),
        })?;
        let field = rec
            .field
            .parse()
            .map_err(|reason| CorpusError::Malformed { line, reason })?;
        map.insert((rec.id, field), rec.count);
    }
    Ok(SubwordCounts(map))
}

/// Train/validation/test partition.
#[derive(Clone, Debug)]
pub struct Split {
    pub train: Corpus,
    pub val: Corpus,
    pub test: Corpus,
}

/// Deterministic seeded split. Validation and test sizes are floored; the
/// remainder goes to train.
pub fn split_dataset(corpus: &Corpus, ratios: (f64, f64, f64), seed: u64) -> Result<Split, CorpusError> {
    let (tr, va, te) = ratios;
    if !(tr > 0.0 && va > 0.0 && te > 0.0) || ((tr + va + te) - 1.0).abs() > 1e-9 {
        return Err(CorpusError::BadRatios(ratios));
    }
    let n = corpus.len();
    if n < 3 {
        return Err(CorpusError::TooSmallToSplit(n));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let n_val = (n as f64 * va + 1e-9).floor() as usize;
    let n_test = (n as f64 * te + 1e-9).floor() as usize;
    let n_train = n - n_val - n_test;

    let name = corpus.name();
    Ok(Split {
        train: corpus.subset(&order[..n_train], format!("{name}:train")),
        val: corpus.subset(&order[n_train..n_train + n_val], format!("{name}:val")),
        test: corpus.subset(&order[n_train + n_val..], format!("{name}:test")),
    })
}
