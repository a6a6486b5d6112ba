//! Corpus characterization: element lengths, and ROUGE overlap between
//! verdict/article, claim/verdict and claim/article with first/last sentence
//! ablations.
//!
//! In every pair the first-named text is the ROUGE reference (so recall says
//! how much of it is found in the second, containing text), and ablations
//! remove a sentence from the containing text.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Field, SegmentedTriple};
use crate::published::{self, benchmark_of};
use crate::rouge::{score_all, RougeSet, RougeVariant};

pub const DEFAULT_BUDGETS: [usize; 2] = [512, 1024];

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("corpus `{0}` is empty")]
    EmptyCorpus(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("report row {row}: {reason}")]
    BadRow { row: usize, reason: String },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ElementLengths {
    pub sentences: f64,
    pub tokens: f64,
    pub subwords: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthStats {
    pub dataset: String,
    pub article: ElementLengths,
    pub claim: ElementLengths,
    pub verdict: ElementLengths,
    /// (budget, fraction of articles whose subword count exceeds it)
    pub exceed: Vec<(usize, f64)>,
}

impl LengthStats {
    pub fn get(&self, field: Field) -> &ElementLengths {
        match field {
            Field::Article => &self.article,
            Field::Claim => &self.claim,
            Field::Verdict => &self.verdict,
        }
    }

    fn get_mut(&mut self, field: Field) -> &mut ElementLengths {
        match field {
            Field::Article => &mut self.article,
            Field::Claim => &mut self.claim,
            Field::Verdict => &mut self.verdict,
        }
    }
}

pub fn length_stats(corpus: &Corpus, budgets: &[usize]) -> Result<LengthStats, AnalysisError> {
    if corpus.is_empty() {
        return Err(AnalysisError::EmptyCorpus(corpus.name().to_owned()));
    }
    let n = corpus.len() as f64;
    let mut stats = LengthStats {
        dataset: dataset_label(corpus),
        article: ElementLengths::default(),
        claim: ElementLengths::default(),
        verdict: ElementLengths::default(),
        exceed: Vec::new(),
    };
    for field in Field::ALL {
        let mut sums = (0usize, 0usize, 0usize);
        for (_, seg) in corpus.iter() {
            let doc = seg.get(field);
            sums.0 += doc.sentence_count();
            sums.1 += doc.token_count();
            sums.2 += doc.subword_estimate();
        }
        *stats.get_mut(field) = ElementLengths {
            sentences: sums.0 as f64 / n,
            tokens: sums.1 as f64 / n,
            subwords: sums.2 as f64 / n,
        };
    }
    stats.exceed = budgets
        .iter()
        .map(|&b| {
            let over = corpus.iter().filter(|(_, s)| s.article.subword_estimate() > b).count();
            (b, over as f64 / n)
        })
        .collect();
    Ok(stats)
}

fn dataset_label(corpus: &Corpus) -> String {
    match corpus.datasets().as_slice() {
        [one] => one.clone(),
        _ => corpus.name().to_owned(),
    }
}

/// Which two texts are compared; the first is the ROUGE reference.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    VerdictArticle,
    ClaimVerdict,
    ClaimArticle,
}

impl PairKind {
    pub const ALL: [PairKind; 3] = [PairKind::VerdictArticle, PairKind::ClaimVerdict, PairKind::ClaimArticle];

    /// (reference, container)
    pub fn fields(self) -> (Field, Field) {
        match self {
            PairKind::VerdictArticle => (Field::Verdict, Field::Article),
            PairKind::ClaimVerdict => (Field::Claim, Field::Verdict),
            PairKind::ClaimArticle => (Field::Claim, Field::Article),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PairKind::VerdictArticle => "verdict_article",
            PairKind::ClaimVerdict => "claim_verdict",
            PairKind::ClaimArticle => "claim_article",
        }
    }
}

impl FromStr for PairKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PairKind::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown pair `{s}`"))
    }
}

impl fmt::Display for PairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ablation {
    Complete,
    NoFirst,
    NoLast,
}

impl Ablation {
    pub const ALL: [Ablation; 3] = [Ablation::Complete, Ablation::NoFirst, Ablation::NoLast];

    pub fn as_str(self) -> &'static str {
        match self {
            Ablation::Complete => "complete",
            Ablation::NoFirst => "no_first",
            Ablation::NoLast => "no_last",
        }
    }
}

impl FromStr for Ablation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ablation::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| format!("unknown variant `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapStats {
    pub dataset: String,
    pub pair: PairKind,
    pub variant: Ablation,
    /// R1, R2, RL
    pub recall: [f64; 3],
    pub f1: [f64; 3],
    pub scored: usize,
    /// Triples whose ablated container had no tokens left.
    pub excluded: usize,
}

/// ROUGE of one triple for a pair and ablation, or `None` when the ablation
/// leaves the container empty.
pub fn overlap_one(seg: &SegmentedTriple, pair: PairKind, variant: Ablation) -> Option<RougeSet> {
    let (reference, container) = pair.fields();
    let reference = seg.get(reference).words();
    let doc = seg.get(container);
    let s = doc.sentence_count();
    let candidate = match variant {
        Ablation::Complete => doc.words().to_vec(),
        Ablation::NoFirst => doc.words_without(&[0]),
        Ablation::NoLast => doc.words_without(&[s.saturating_sub(1)]),
    };
    if candidate.is_empty() {
        return None;
    }
    Some(score_all(&candidate, reference))
}

pub fn overlap_stats(corpus: &Corpus, pair: PairKind, variant: Ablation) -> Result<OverlapStats, AnalysisError> {
    if corpus.is_empty() {
        return Err(AnalysisError::EmptyCorpus(corpus.name().to_owned()));
    }
    let mut rows: Vec<(&str, RougeSet)> = corpus
        .iter()
        .filter_map(|(t, seg)| overlap_one(seg, pair, variant).map(|s| (t.id.as_str(), s)))
        .collect();
    rows.sort_by(|a, b| a.0.cmp(b.0));
    let excluded = corpus.len() - rows.len();
    let mut recall = [0.0; 3];
    let mut f1 = [0.0; 3];
    if !rows.is_empty() {
        let sets: Vec<RougeSet> = rows.into_iter().map(|(_, s)| s).collect();
        let mean = RougeSet::mean(&sets).expect("non-empty");
        for (i, v) in RougeVariant::ALL.into_iter().enumerate() {
            recall[i] = mean.get(v).recall;
            f1[i] = mean.get(v).f1;
        }
    }
    Ok(OverlapStats {
        dataset: dataset_label(corpus),
        pair,
        variant,
        recall,
        f1,
        scored: corpus.len() - excluded,
        excluded,
    })
}

/// Length and overlap statistics of every dataset in a corpus.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisReport {
    pub lengths: Vec<LengthStats>,
    pub overlaps: Vec<OverlapStats>,
}

impl AnalysisReport {
    pub fn compute(corpus: &Corpus, budgets: &[usize]) -> Result<Self, AnalysisError> {
        if corpus.is_empty() {
            return Err(AnalysisError::EmptyCorpus(corpus.name().to_owned()));
        }
        let mut lengths = Vec::new();
        let mut overlaps = Vec::new();
        for dataset in corpus.datasets() {
            let sub = corpus.filter_dataset(&dataset);
            lengths.push(length_stats(&sub, budgets)?);
            for pair in PairKind::ALL {
                for variant in Ablation::ALL {
                    overlaps.push(overlap_stats(&sub, pair, variant)?);
                }
            }
        }
        Ok(AnalysisReport { lengths, overlaps })
    }

    /// Long-format CSV: `table,dataset,variant,metric,value`.
    pub fn to_csv(&self) -> Result<String, AnalysisError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["table", "dataset", "variant", "metric", "value"])?;
        for l in &self.lengths {
            for field in Field::ALL {
                let e = l.get(field);
                for (metric, value) in [("sentences_mean", e.sentences), ("tokens_mean", e.tokens), ("subwords_mean", e.subwords)] {
                    w.write_record(["lengths", &l.dataset, field.as_str(), metric, &value.to_string()])?;
                }
                if field == Field::Article {
                    for (budget, frac) in &l.exceed {
                        w.write_record(["lengths", &l.dataset, "article", &format!("exceed_{budget}"), &frac.to_string()])?;
                    }
                }
            }
        }
        for o in &self.overlaps {
            let mut row = |metric: String, value: String| {
                w.write_record(["overlap_".to_owned() + o.pair.as_str(), o.dataset.clone(), o.variant.as_str().to_owned(), metric, value])
            };
            for (i, v) in RougeVariant::ALL.into_iter().enumerate() {
                row(format!("{v}_recall"), o.recall[i].to_string())?;
            }
            for (i, v) in RougeVariant::ALL.into_iter().enumerate() {
                row(format!("{v}_f1"), o.f1[i].to_string())?;
            }
            row("scored".into(), o.scored.to_string())?;
            row("excluded".into(), o.excluded.to_string())?;
        }
        let bytes = w.into_inner().map_err(|e| AnalysisError::Io {
            path: "<memory>".into(),
            source: std::io::Error::other(e.to_string()),
        })?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Parses the output of [`AnalysisReport::to_csv`].
    pub fn from_csv(content: &str) -> Result<Self, AnalysisError> {
        let mut r = csv::Reader::from_reader(content.as_bytes());
        let mut lengths: Vec<LengthStats> = Vec::new();
        let mut overlaps: Vec<OverlapStats> = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let row = i + 2;
            let bad = |reason: String| AnalysisError::BadRow { row, reason };
            let [table, dataset, variant, metric, value] = [0, 1, 2, 3, 4].map(|c| rec.get(c).unwrap_or(""));
            let num: f64 = value.parse().map_err(|_| bad(format!("bad value `{value}`")))?;

            if table == "lengths" {
                if lengths.last().is_none_or(|l| l.dataset != dataset) {
                    lengths.push(LengthStats {
                        dataset: dataset.to_owned(),
                        article: ElementLengths::default(),
                        claim: ElementLengths::default(),
                        verdict: ElementLengths::default(),
                        exceed: Vec::new(),
                    });
                }
                let l = lengths.last_mut().expect("just pushed");
                let field: Field = variant.parse().map_err(bad)?;
                match metric {
                    "sentences_mean" => l.get_mut(field).sentences = num,
                    "tokens_mean" => l.get_mut(field).tokens = num,
                    "subwords_mean" => l.get_mut(field).subwords = num,
                    m => {
                        let budget = m
                            .strip_prefix("exceed_")
                            .and_then(|b| b.parse().ok())
                            .ok_or_else(|| bad(format!("unknown length metric `{m}`")))?;
                        l.exceed.push((budget, num));
                    }
                }
                continue;
            }

            let pair: PairKind = table
                .strip_prefix("overlap_")
                .ok_or_else(|| bad(format!("unknown table `{table}`")))?
                .parse()
                .map_err(bad)?;
            let variant: Ablation = variant.parse().map_err(bad)?;
            if overlaps
                .last()
                .is_none_or(|o| (o.dataset.as_str(), o.pair, o.variant) != (dataset, pair, variant))
            {
                overlaps.push(OverlapStats {
                    dataset: dataset.to_owned(),
                    pair,
                    variant,
                    recall: [0.0; 3],
                    f1: [0.0; 3],
                    scored: 0,
                    excluded: 0,
                });
            }
            let o = overlaps.last_mut().expect("just pushed");
            let idx = |v: &str| match v {
                "R1" => Some(0),
                "R2" => Some(1),
                "RL" => Some(2),
                _ => None,
            };
            match metric.split_once('_') {
                Some((v, "recall")) if idx(v).is_some() => o.recall[idx(v).unwrap()] = num,
                Some((v, "f1")) if idx(v).is_some() => o.f1[idx(v).unwrap()] = num,
                _ if metric == "scored" => o.scored = num as usize,
                _ if metric == "excluded" => o.excluded = num as usize,
                _ => return Err(bad(format!("unknown overlap metric `{metric}`"))),
            }
        }
        Ok(AnalysisReport { lengths, overlaps })
    }

    /// Human-readable Markdown summary with the text-processing configuration.
    pub fn to_markdown(&self, corpus: &Corpus) -> String {
        let mut md = String::new();
        let _ = writeln!(md, "# Corpus analysis: {}\n", corpus.name());
        let _ = writeln!(md, "- text: {}", corpus.pipeline().describe());
        let _ = writeln!(
            md,
            "- rouge: clipped n-gram overlap, summary-level LCS; the first text of each pair is the reference, ablations drop a sentence of the second"
        );
        let _ = writeln!(md, "- published values (when the dataset is recognised) are shown for reference only\n");

        let _ = writeln!(md, "## Lengths\n");
        let _ = writeln!(md, "| dataset | element | SENT | TOK | SUBWORD | published SENT/TOK/BPE |");
        let _ = writeln!(md, "|---|---|---|---|---|---|");
        for l in &self.lengths {
            for field in Field::ALL {
                let e = l.get(field);
                let reference = benchmark_of(&l.dataset)
                    .map(|b| {
                        let (s, t, p) = published::lengths(b, field);
                        format!("{s} / {t} / {p}")
                    })
                    .unwrap_or_else(|| "-".into());
                let _ = writeln!(
                    md,
                    "| {} | {} | {:.2} | {:.2} | {:.2} | {} |",
                    l.dataset,
                    field.as_str(),
                    e.sentences,
                    e.tokens,
                    e.subwords,
                    reference
                );
            }
            for (budget, frac) in &l.exceed {
                let _ = writeln!(md, "\n{}: {:.1}% of articles exceed {} subwords", l.dataset, frac * 100.0, budget);
            }
            let _ = writeln!(md);
        }

        for pair in PairKind::ALL {
            let (r, c) = pair.fields();
            let _ = writeln!(md, "## Overlap: {} (reference) in {}\n", r.as_str(), c.as_str());
            let _ = writeln!(md, "| dataset | variant | R1 rec | R2 rec | RL rec | R1 F1 | R2 F1 | RL F1 | scored | excluded | published rec |");
            let _ = writeln!(md, "|---|---|---|---|---|---|---|---|---|---|---|");
            for o in self.overlaps.iter().filter(|o| o.pair == pair) {
                let reference = benchmark_of(&o.dataset)
                    .and_then(|b| published::overlap_recall(b, pair, o.variant))
                    .map(|v| format!("{:.3} / {:.3} / {:.3}", v[0], v[1], v[2]))
                    .unwrap_or_else(|| "-".into());
                let _ = writeln!(
                    md,
                    "| {} | {} | {:.3} | {:.3} | {:.3} | {:.3} | {:.3} | {:.3} | {} | {} | {} |",
                    o.dataset,
                    o.variant.as_str(),
                    o.recall[0],
                    o.recall[1],
                    o.recall[2],
                    o.f1[0],
                    o.f1[1],
                    o.f1[2],
                    o.scored,
                    o.excluded,
                    reference
                );
            }
            let _ = writeln!(md);
        }
        md
    }
}

/// Writes `analysis.csv` and `analysis.md` into `out_dir`.
pub fn report(corpus: &Corpus, out_dir: &Path) -> Result<(PathBuf, PathBuf), AnalysisError> {
    let analysis = AnalysisReport::compute(corpus, &DEFAULT_BUDGETS)?;
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| AnalysisError::Io { path, source }
    };
    fs::create_dir_all(out_dir).map_err(io(out_dir))?;
    let csv_path = out_dir.join("analysis.csv");
    let md_path = out_dir.join("analysis.md");
    fs::write(&csv_path, analysis.to_csv()?).map_err(io(&csv_path))?;
    fs::write(&md_path, analysis.to_markdown(corpus)).map_err(io(&md_path))?;
    Ok((csv_path, md_path))
}
