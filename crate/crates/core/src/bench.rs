//! Benchmark grid: expansion of a declared set of axes into run
//! configurations, execution against a corpus, and comparison tables.
//!
//! # Grid file
//!
//! TOML with an `[axes]` table. `dataset` and `summary` are required; the
//! generation axes `model`, `finetune` and `decoding` are declared together
//! or not at all (in which case the grid is extractive only).
//!
//! ```toml
//! seed = 13          # forwarded to the generator, default 0
//! k = "auto"         # or a positive integer, default "auto"
//!
//! [axes]
//! dataset = ["liarpp", "fullfact"]
//! summary = ["truncation/head", "lexrank/top/article", "claimdriven/bottom/ranking"]
//! finetune = [{ label = "claim_article", mode = "claim_article" }, "article"]
//! decoding = ["beam", { strategy = "topk", params = { k = 20 } }]
//!
//! [[axes.model]]
//! label = "bart"
//! endpoint = "http://localhost:8000/{finetune}"   # optional
//! budget = 1024                                    # default 1024
//! ```
//!
//! A summary is `method/selection[/ordering]`; truncation takes `head` or
//! `tail` and no ordering. Cells are emitted in nested declaration order with
//! dataset outermost, then summary, model, finetune and decoding.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::{load_corpus, Corpus, CorpusError, CorpusFormat};
use crate::embedder::SentenceEncoder;
use crate::extractive::{
    auto_k, extract, ExtractConfig, ExtractError, Method, Selection, SentenceCount, SentenceOrder,
};
use crate::genbridge::{assemble_input, DecodingSpec, GenError, GenMode, GenerationClient, Strategy};
use crate::published::{self, benchmark_of};
use crate::rouge::{score_all, RougeSet, RougeVariant};
use crate::text::{tokenize, TextPipeline};

/// Share of excluded triples above which a run is flagged unreliable.
pub const UNRELIABLE_FRACTION: f64 = 0.10;

/// Placeholder in model endpoints replaced by the fine-tuning label.
pub const FINETUNE_PLACEHOLDER: &str = "{finetune}";

pub const ROUGE_DESCRIPTION: &str = "rouge(n=1,2 clipped; L=summary-level lcs)";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("grid file: {0}")]
    Parse(String),
    #[error("axis `{axis}` is empty")]
    EmptyAxis { axis: &'static str },
    #[error("axis `{axis}`: unknown value `{value}`: {reason}")]
    UnknownValue {
        axis: &'static str,
        value: String,
        reason: String,
    },
    #[error("axis `{axis}`: duplicate value `{value}`")]
    DuplicateValue { axis: &'static str, value: String },
    #[error("generation axes must be declared together; missing {0}")]
    PartialGeneration(String),
    #[error("dataset `{0}` has no triples in the corpus")]
    MissingDataset(String),
    #[error("model `{0}` has no endpoint and no default generation endpoint was given")]
    NoEndpoint(String),
    #[error("run {fingerprint}: no triple could be scored ({excluded} excluded)")]
    NothingScored { fingerprint: String, excluded: usize },
    #[error("run {fingerprint}: {source}")]
    Extract {
        fingerprint: String,
        #[source]
        source: ExtractError,
    },
    #[error("run {fingerprint}: {source}")]
    Generation {
        fingerprint: String,
        #[source]
        source: GenError,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("nothing to compare")]
    NoResults,
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    ExtractiveOnly,
    ExtractivePlusGeneration,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::ExtractiveOnly => "extractive_only",
            Stage::ExtractivePlusGeneration => "extractive_plus_generation",
        }
    }
}

/// Generation half of a run; the model and fine-tuning labels are opaque.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationSpec {
    pub model: String,
    pub finetune: String,
    pub mode: GenMode,
    pub budget: usize,
    pub decoding: DecodingSpec,
    /// Resolved endpoint; `None` defers to the backend default.
    pub endpoint: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub dataset: String,
    pub extract: ExtractConfig,
    pub stage: Stage,
    pub generation: Option<GenerationSpec>,
    pub seed: u64,
}

impl RunConfig {
    pub fn extractive(dataset: impl Into<String>, extract: ExtractConfig) -> Self {
        RunConfig {
            dataset: dataset.into(),
            extract,
            stage: Stage::ExtractiveOnly,
            generation: None,
            seed: 0,
        }
    }

    /// Everything that determines the output of a run: the configuration, the
    /// text pipeline, the ROUGE variant and the sentence encoder.
    pub fn effective(&self, pipeline: &TextPipeline, encoder: &str) -> String {
        let config = serde_json::to_string(self).expect("run config serializes");
        format!("config={config}; text={}; {ROUGE_DESCRIPTION}; encoder={encoder}", pipeline.describe())
    }

    /// First 16 hex digits of the SHA-256 of [`RunConfig::effective`].
    pub fn fingerprint(&self, pipeline: &TextPipeline, encoder: &str) -> String {
        fingerprint_of(&self.effective(pipeline, encoder))
    }

    pub fn summary_label(&self) -> String {
        summary_label(&self.extract)
    }
}

pub fn fingerprint_of(effective: &str) -> String {
    hex::encode(&Sha256::digest(effective.as_bytes())[..8])
}

fn summary_label(e: &ExtractConfig) -> String {
    match e.method {
        Method::Truncation => {
            let side = if e.selection == Selection::Top { "head" } else { "tail" };
            format!("truncation/{side}")
        }
        m => format!("{m}/{}/{}", e.selection, e.ordering),
    }
}

/// Parses `method/selection[/ordering]`.
pub fn parse_summary(s: &str, k: SentenceCount) -> Result<ExtractConfig, String> {
    let parts: Vec<&str> = s.split('/').map(str::trim).collect();
    let (method, selection) = match parts.as_slice() {
        [m, sel, ..] => (m.parse::<Method>()?, sel.parse::<Selection>()?),
        _ => return Err("expected method/selection[/ordering]".into()),
    };
    let ordering = match (method, parts.get(2)) {
        (Method::Truncation, None) => SentenceOrder::Article,
        (Method::Truncation, Some(_)) => return Err("truncation takes no ordering".into()),
        (_, Some(o)) if parts.len() == 3 => o.parse::<SentenceOrder>()?,
        (_, None) => return Err(format!("{method} needs an ordering (article or ranking)")),
        _ => return Err("too many components".into()),
    };
    Ok(ExtractConfig::new(method, k, selection, ordering))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    k: Option<KValue>,
    axes: Axes,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum KValue {
    Int(i64),
    Str(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Axes {
    dataset: Vec<String>,
    summary: Vec<String>,
    model: Option<Vec<ModelAxis>>,
    finetune: Option<Vec<FinetuneAxis>>,
    decoding: Option<Vec<DecodingAxis>>,
}

#[derive(Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelAxis {
    label: String,
    endpoint: Option<String>,
    #[serde(default = "default_budget")]
    budget: usize,
}

fn default_budget() -> usize {
    1024
}

#[derive(Clone, Deserialize)]
#[serde(untagged)]
enum FinetuneAxis {
    Label(String),
    Full { label: String, mode: String },
}

#[derive(Clone, Deserialize)]
#[serde(untagged)]
enum DecodingAxis {
    Name(String),
    Full {
        strategy: String,
        #[serde(default)]
        params: Option<BTreeMap<String, f64>>,
    },
}

/// A parsed, validated grid declaration.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub seed: u64,
    pub k: SentenceCount,
    pub datasets: Vec<String>,
    pub summaries: Vec<ExtractConfig>,
    pub generation: Option<GenerationAxes>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenerationAxes {
    /// (label, endpoint template, budget)
    pub models: Vec<(String, Option<String>, usize)>,
    /// (label, mode)
    pub finetunes: Vec<(String, GenMode)>,
    pub decodings: Vec<DecodingSpec>,
}

fn non_empty<T>(axis: &'static str, v: &[T]) -> Result<(), BenchError> {
    if v.is_empty() {
        Err(BenchError::EmptyAxis { axis })
    } else {
        Ok(())
    }
}

fn unique(axis: &'static str, labels: impl IntoIterator<Item = String>) -> Result<(), BenchError> {
    let mut seen = BTreeSet::new();
    for l in labels {
        if !seen.insert(l.clone()) {
            return Err(BenchError::DuplicateValue { axis, value: l });
        }
    }
    Ok(())
}

impl FromStr for GridSpec {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let file: GridFile = toml::from_str(s).map_err(|e| BenchError::Parse(e.to_string()))?;
        let unknown = |axis, value: &str, reason: String| BenchError::UnknownValue {
            axis,
            value: value.to_owned(),
            reason,
        };

        let k = match file.k {
            None => SentenceCount::Auto,
            Some(KValue::Int(n)) => n
                .to_string()
                .parse()
                .map_err(|e| unknown("k", &n.to_string(), e))?,
            Some(KValue::Str(s)) => s.parse().map_err(|e| unknown("k", &s, e))?,
        };

        let axes = file.axes;
        non_empty("dataset", &axes.dataset)?;
        non_empty("summary", &axes.summary)?;
        unique("dataset", axes.dataset.iter().cloned())?;
        unique("summary", axes.summary.iter().cloned())?;
        if let Some(d) = axes.dataset.iter().find(|d| d.trim().is_empty()) {
            return Err(unknown("dataset", d, "dataset tags must be non-empty".into()));
        }
        let summaries = axes
            .summary
            .iter()
            .map(|s| parse_summary(s, k).map_err(|e| unknown("summary", s, e)))
            .collect::<Result<Vec<_>, _>>()?;

        let generation = match (axes.model, axes.finetune, axes.decoding) {
            (None, None, None) => None,
            (Some(models), Some(finetunes), Some(decodings)) => {
                non_empty("model", &models)?;
                non_empty("finetune", &finetunes)?;
                non_empty("decoding", &decodings)?;
                unique("model", models.iter().map(|m| m.label.clone()))?;
                let models = models
                    .into_iter()
                    .map(|m| {
                        if m.budget == 0 {
                            Err(unknown("model", &m.label, "budget must be positive".into()))
                        } else {
                            Ok((m.label, m.endpoint, m.budget))
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let finetunes = finetunes
                    .into_iter()
                    .map(|f| {
                        let (label, mode) = match f {
                            FinetuneAxis::Label(l) => (l.clone(), l),
                            FinetuneAxis::Full { label, mode } => (label, mode),
                        };
                        let mode = mode.parse::<GenMode>().map_err(|e| unknown("finetune", &mode, e))?;
                        Ok((label, mode))
                    })
                    .collect::<Result<Vec<_>, BenchError>>()?;
                unique("finetune", finetunes.iter().map(|f| f.0.clone()))?;
                let decodings = decodings
                    .into_iter()
                    .map(|d| {
                        let (name, params) = match d {
                            DecodingAxis::Name(n) => (n, None),
                            DecodingAxis::Full { strategy, params } => (strategy, params),
                        };
                        let strategy = name.parse::<Strategy>().map_err(|e| unknown("decoding", &name, e))?;
                        let spec = match params {
                            None => DecodingSpec::default_for(strategy),
                            Some(params) => DecodingSpec { strategy, params },
                        };
                        spec.validate().map_err(|e| unknown("decoding", &name, e.to_string()))?;
                        Ok(spec)
                    })
                    .collect::<Result<Vec<_>, BenchError>>()?;
                unique("decoding", decodings.iter().map(DecodingSpec::label))?;
                Some(GenerationAxes {
                    models,
                    finetunes,
                    decodings,
                })
            }
            (m, f, d) => {
                let missing: Vec<&str> = [("model", m.is_none()), ("finetune", f.is_none()), ("decoding", d.is_none())]
                    .into_iter()
                    .filter(|(_, absent)| *absent)
                    .map(|(n, _)| n)
                    .collect();
                return Err(BenchError::PartialGeneration(missing.join(", ")));
            }
        };

        Ok(GridSpec {
            seed: file.seed,
            k,
            datasets: axes.dataset,
            summaries,
            generation,
        })
    }
}

impl GridSpec {
    pub fn load(path: &Path) -> Result<Self, BenchError> {
        fs::read_to_string(path)
            .map_err(|source| BenchError::Io {
                path: path.display().to_string(),
                source,
            })?
            .parse()
    }

    /// Product of the axis cardinalities.
    pub fn size(&self) -> usize {
        let gen = self
            .generation
            .as_ref()
            .map_or(1, |g| g.models.len() * g.finetunes.len() * g.decodings.len());
        self.datasets.len() * self.summaries.len() * gen
    }

    pub fn expand(&self) -> Vec<RunConfig> {
        let mut out = Vec::with_capacity(self.size());
        for dataset in &self.datasets {
            for summary in &self.summaries {
                let base = RunConfig {
                    dataset: dataset.clone(),
                    extract: *summary,
                    stage: Stage::ExtractiveOnly,
                    generation: None,
                    seed: self.seed,
                };
                let Some(g) = &self.generation else {
                    out.push(base);
                    continue;
                };
                for (model, endpoint, budget) in &g.models {
                    for (finetune, mode) in &g.finetunes {
                        for decoding in &g.decodings {
                            out.push(RunConfig {
                                stage: Stage::ExtractivePlusGeneration,
                                generation: Some(GenerationSpec {
                                    model: model.clone(),
                                    finetune: finetune.clone(),
                                    mode: *mode,
                                    budget: *budget,
                                    decoding: decoding.clone(),
                                    endpoint: endpoint.as_ref().map(|e| e.replace(FINETUNE_PLACEHOLDER, finetune)),
                                }),
                                ..base.clone()
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

/// Parses and expands a grid declaration.
pub fn expand_grid(spec: &str) -> Result<Vec<RunConfig>, BenchError> {
    Ok(spec.parse::<GridSpec>()?.expand())
}

/// The ten per-dataset summary configurations: LexRank and claim-driven
/// under both selections and both orderings, plus truncation head and tail.
pub fn standard_summaries() -> Vec<String> {
    let mut out = vec!["truncation/head".to_owned(), "truncation/tail".to_owned()];
    for m in ["lexrank", "claimdriven"] {
        for s in ["top", "bottom"] {
            for o in ["article", "ranking"] {
                out.push(format!("{m}/{s}/{o}"));
            }
        }
    }
    out
}

/// External services a run may need.
pub struct Backends<'a> {
    pub encoder: &'a dyn SentenceEncoder,
    /// Used for models whose grid entry has no endpoint.
    pub default_gen_endpoint: Option<String>,
    pub gen_in_flight: usize,
}

impl<'a> Backends<'a> {
    pub fn new(encoder: &'a dyn SentenceEncoder) -> Self {
        Backends {
            encoder,
            default_gen_endpoint: None,
            gen_in_flight: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub config: RunConfig,
    pub fingerprint: String,
    /// Mean scores over the scored triples, averaged in id order.
    pub scores: RougeSet,
    pub triples: usize,
    pub excluded: usize,
    pub unreliable: bool,
    pub wall_time: Duration,
}

/// Extracts (and optionally generates) for every triple of the config's
/// dataset, scoring against the gold verdicts.
pub fn run(corpus: &Corpus, config: &RunConfig, backends: &Backends) -> Result<RunResult, BenchError> {
    let start = Instant::now();
    let fingerprint = config.fingerprint(corpus.pipeline(), &backends.encoder.label());
    let data = corpus.filter_dataset(&config.dataset);
    if data.is_empty() {
        return Err(BenchError::MissingDataset(config.dataset.clone()));
    }
    let k_auto = auto_k(&config.dataset, data.mean_verdict_sentences());

    let extracts: Vec<Option<(String, crate::extractive::Extract)>> = (0..data.len())
        .into_par_iter()
        .map(|i| {
            let (triple, seg) = (&data.triples()[i], data.segmented(i));
            match extract(&seg.article, &seg.claim, &config.extract, k_auto, backends.encoder) {
                Ok(e) => Ok(Some((triple.id.clone(), e))),
                Err(ExtractError::EmptyArticle) => Ok(None),
                Err(source) => Err(BenchError::Extract {
                    fingerprint: fingerprint.clone(),
                    source,
                }),
            }
        })
        .collect::<Result<_, _>>()?;

    // (id, candidate text) per scorable triple
    let candidates: Vec<(String, String)> = match &config.generation {
        None => extracts.into_iter().flatten().map(|(id, e)| (id, e.text)).collect(),
        Some(g) => {
            let inputs: Vec<_> = extracts
                .iter()
                .flatten()
                .filter_map(|(id, e)| {
                    let (t, _) = data.get(id).expect("id from corpus");
                    assemble_input(id, &t.claim, e, g.mode, g.budget, data.pipeline()).ok()
                })
                .collect();
            let endpoint = g
                .endpoint
                .clone()
                .or_else(|| {
                    backends
                        .default_gen_endpoint
                        .as_ref()
                        .map(|e| e.replace(FINETUNE_PLACEHOLDER, &g.finetune))
                })
                .ok_or_else(|| BenchError::NoEndpoint(g.model.clone()))?;
            let mut client = GenerationClient::new(endpoint);
            client.max_in_flight = backends.gen_in_flight.max(1);
            let mut out = Vec::with_capacity(inputs.len());
            for r in client.generate_all(&inputs, &g.decoding, config.seed as i64) {
                let r = r.map_err(|source| BenchError::Generation {
                    fingerprint: fingerprint.clone(),
                    source,
                })?;
                if !r.empty {
                    out.push((r.triple_id, r.text));
                }
            }
            out
        }
    };

    let mut scored: Vec<(String, RougeSet)> = candidates
        .into_par_iter()
        .map(|(id, text)| {
            let (_, seg) = data.get(&id).expect("id from corpus");
            let s = score_all(&tokenize(&text), seg.verdict.words());
            (id, s)
        })
        .collect();
    scored.sort_by(|a, b| a.0.cmp(&b.0));
    let excluded = data.len() - scored.len();
    if scored.is_empty() {
        return Err(BenchError::NothingScored { fingerprint, excluded });
    }
    let sets: Vec<RougeSet> = scored.into_iter().map(|(_, s)| s).collect();
    Ok(RunResult {
        config: config.clone(),
        fingerprint,
        scores: RougeSet::mean(&sets).expect("non-empty"),
        triples: sets.len(),
        excluded,
        unreliable: excluded as f64 > UNRELIABLE_FRACTION * data.len() as f64,
        wall_time: start.elapsed(),
    })
}

/// Runs every config with at most `jobs` worker threads; results follow
/// config order.
pub fn run_all(
    corpus: &Corpus,
    configs: &[RunConfig],
    backends: &Backends,
    jobs: usize,
) -> Result<Vec<RunResult>, BenchError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| BenchError::Io {
            path: "<thread pool>".into(),
            source: std::io::Error::other(e),
        })?;
    pool.install(|| configs.par_iter().map(|c| run(corpus, c, backends)).collect())
}

/// Loads `<dir>/<dataset>.jsonl` for every dataset into one corpus.
pub fn load_datasets(dir: &Path, datasets: &[String], pipeline: &TextPipeline) -> Result<Corpus, BenchError> {
    let mut triples = Vec::new();
    for d in datasets {
        let c = load_corpus(&dir.join(format!("{d}.jsonl")), CorpusFormat::Jsonl, pipeline)?;
        triples.extend(c.triples().iter().cloned().map(|mut t| {
            t.dataset = d.clone();
            t
        }));
    }
    let name = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "grid".into());
    Ok(Corpus::from_triples(&name, triples, pipeline)?)
}

const CSV_HEADER: [&str; 21] = [
    "config_fingerprint",
    "dataset",
    "method",
    "selection",
    "ordering",
    "k",
    "stage",
    "model",
    "finetune",
    "mode",
    "budget",
    "decoding",
    "R1",
    "R2",
    "RL",
    "R1_recall",
    "R2_recall",
    "RL_recall",
    "triples",
    "excluded",
    "unreliable",
];

/// CSV with one row per result, in input order. F1 goes in `R1,R2,RL`.
/// Wall time is left out so identical runs produce identical bytes.
pub fn results_csv(results: &[RunResult]) -> Result<String, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in results {
        let c = &r.config;
        let g = c.generation.as_ref();
        let f1 = RougeVariant::ALL.map(|v| r.scores.get(v).f1.to_string());
        let rec = RougeVariant::ALL.map(|v| r.scores.get(v).recall.to_string());
        let row = [
            r.fingerprint.clone(),
            c.dataset.clone(),
            c.extract.method.to_string(),
            c.extract.selection.to_string(),
            c.extract.ordering.to_string(),
            c.extract.k.to_string(),
            c.stage.as_str().to_owned(),
            g.map(|g| g.model.clone()).unwrap_or_default(),
            g.map(|g| g.finetune.clone()).unwrap_or_default(),
            g.map(|g| g.mode.to_string()).unwrap_or_default(),
            g.map(|g| g.budget.to_string()).unwrap_or_default(),
            g.map(|g| g.decoding.label()).unwrap_or_default(),
        ];
        let tail = [r.triples.to_string(), r.excluded.to_string(), r.unreliable.to_string()];
        w.write_record(row.iter().chain(&f1).chain(&rec).chain(&tail))?;
    }
    let bytes = w.into_inner().map_err(|e| BenchError::Io {
        path: "<memory>".into(),
        source: std::io::Error::other(e.to_string()),
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn fmt3(x: f64) -> String {
    format!("{x:.3}")
}

fn published_cell(dataset: &str, e: &ExtractConfig) -> String {
    match benchmark_of(dataset) {
        Some(b) if e.ordering == SentenceOrder::Article => {
            let v = published::extractive_f1(b, e.method, e.selection == Selection::Top);
            format!("{} / {} / {}", fmt3(v[0]), fmt3(v[1]), fmt3(v[2]))
        }
        _ => "-".into(),
    }
}

/// Markdown pivot tables: extractive results in article order and in ranking
/// order, then generation results. Empty views are omitted.
pub fn results_markdown(results: &[RunResult], header: &str) -> String {
    let mut md = String::new();
    let _ = writeln!(md, "# Benchmark results\n");
    for line in header.lines() {
        let _ = writeln!(md, "- {line}");
    }
    let _ = writeln!(md);

    let flag = |r: &RunResult| if r.unreliable { " (unreliable)" } else { "" };
    let extractive: Vec<&RunResult> = results.iter().filter(|r| r.config.stage == Stage::ExtractiveOnly).collect();
    for (title, ordering) in [
        ("Extractive F1, article order", SentenceOrder::Article),
        ("Extractive F1, ranking order", SentenceOrder::Ranking),
    ] {
        let rows: Vec<&&RunResult> = extractive
            .iter()
            .filter(|r| r.config.extract.ordering == ordering && (ordering == SentenceOrder::Article || r.config.extract.method != Method::Truncation))
            .collect();
        if rows.is_empty() {
            continue;
        }
        let _ = writeln!(md, "## {title}\n");
        let _ = writeln!(md, "| dataset | method | selection | k | R1 | R2 | RL | triples | excluded | published R1/R2/RL | fingerprint |");
        let _ = writeln!(md, "|---|---|---|---|---|---|---|---|---|---|---|");
        for r in rows {
            let e = &r.config.extract;
            let sel = match (e.method, e.selection) {
                (Method::Truncation, Selection::Top) => "head",
                (Method::Truncation, Selection::Bottom) => "tail",
                (_, s) => s.as_str(),
            };
            let _ = writeln!(
                md,
                "| {} | {} | {}{} | {} | {} | {} | {} | {} | {} | {} | `{}` |",
                r.config.dataset,
                e.method,
                sel,
                flag(r),
                e.k,
                fmt3(r.scores.r1.f1),
                fmt3(r.scores.r2.f1),
                fmt3(r.scores.rl.f1),
                r.triples,
                r.excluded,
                published_cell(&r.config.dataset, e),
                r.fingerprint
            );
        }
        let _ = writeln!(md);
    }

    let generated: Vec<&RunResult> = results.iter().filter(|r| r.config.generation.is_some()).collect();
    if !generated.is_empty() {
        let _ = writeln!(md, "## Generation F1\n");
        let _ = writeln!(md, "| dataset | summary | model | finetune | mode | budget | decoding | R1 | R2 | RL | triples | excluded | fingerprint |");
        let _ = writeln!(md, "|---|---|---|---|---|---|---|---|---|---|---|---|---|");
        for r in generated {
            let g = r.config.generation.as_ref().expect("filtered");
            let _ = writeln!(
                md,
                "| {} | {} | {} | {}{} | {} | {} | {} | {} | {} | {} | {} | {} | `{}` |",
                r.config.dataset,
                r.config.summary_label(),
                g.model,
                g.finetune,
                flag(r),
                g.mode,
                g.budget,
                g.decoding.label(),
                fmt3(r.scores.r1.f1),
                fmt3(r.scores.r2.f1),
                fmt3(r.scores.rl.f1),
                r.triples,
                r.excluded,
                r.fingerprint
            );
        }
        let _ = writeln!(md);
    }
    md
}

/// Writes `results.csv` and `results.md` into `out_dir`.
pub fn compare(results: &[RunResult], out_dir: &Path, header: &str) -> Result<(PathBuf, PathBuf), BenchError> {
    if results.is_empty() {
        return Err(BenchError::NoResults);
    }
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| BenchError::Io { path, source }
    };
    fs::create_dir_all(out_dir).map_err(io(out_dir))?;
    let csv_path = out_dir.join("results.csv");
    let md_path = out_dir.join("results.md");
    fs::write(&csv_path, results_csv(results)?).map_err(io(&csv_path))?;
    fs::write(&md_path, results_markdown(results, header)).map_err(io(&md_path))?;
    Ok((csv_path, md_path))
}

/// Header lines for [`compare`]: text pipeline, ROUGE variant, encoder.
pub fn describe_setup(pipeline: &TextPipeline, encoder: &str) -> String {
    format!("text: {}\n{ROUGE_DESCRIPTION}\nencoder: {encoder}", pipeline.describe())
}
