use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{error::ErrorKind, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use vf_core::analysis::{self, AnalysisError};
use vf_core::bench::{self, fingerprint_of, Backends, BenchError, GridSpec, RunConfig, ROUGE_DESCRIPTION};
use vf_core::corpus::{load_corpus, load_subword_counts, Corpus, CorpusError, CorpusFormat};
use vf_core::embedder::{EmbedError, LexicalEncoder, RemoteEmbedder, SentenceEncoder};
use vf_core::extractive::{auto_k, extract, EmbedderKind, ExtractConfig, ExtractError};
use vf_core::genbridge::{score_texts, GenError};
use vf_core::probe::probe;
use vf_core::text::TextPipeline;
use vf_core::{Method, RougeVariant, Selection, SentenceCount, SentenceOrder};

#[derive(Parser)]
#[command(name = "vf", version, about = "Extractive and generative verdict benchmarking for fact-checking corpora")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load and validate a JSONL corpus, then print per-dataset counts.
    Ingest {
        #[arg(long = "in")]
        input: PathBuf,
        /// Only validate; print nothing but the triple count.
        #[arg(long)]
        validate: bool,
        /// Exact subword counts (`{id, field, count}` JSONL) overriding the estimate.
        #[arg(long)]
        subwords: Option<PathBuf>,
    },
    /// Write corpus length and overlap statistics (analysis.csv, analysis.md).
    Analyze {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        subwords: Option<PathBuf>,
    },
    /// Extract sentences from every article; writes JSONL `{id, indices, text, config_fingerprint}`.
    Extract {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        method: Method,
        /// Number of sentences, or `auto` for the dataset's mean verdict length.
        #[arg(long, default_value = "auto")]
        k: SentenceCount,
        #[arg(long, default_value = "top")]
        selection: Selection,
        #[arg(long, default_value = "article")]
        ordering: SentenceOrder,
        /// Output file, or `-` for stdout.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, env = "VF_EMBED_ENDPOINT")]
        embed_endpoint: Option<String>,
    },
    /// Score candidate texts (JSONL with `id` and `text`) against gold verdicts.
    Score {
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
    },
    /// Expand a grid file, run every cell and write results.csv and results.md.
    Bench {
        #[arg(long)]
        grid: PathBuf,
        /// Directory holding `<dataset>.jsonl` for every dataset of the grid.
        #[arg(long)]
        corpus_dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, env = "VF_EMBED_ENDPOINT")]
        embed_endpoint: Option<String>,
        /// Generation endpoint for models without their own.
        #[arg(long)]
        gen_endpoint: Option<String>,
        /// Worker threads for runs and triples.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Check that a remote server speaks the /embed and /generate protocols.
    Probe {
        #[arg(long)]
        endpoint: String,
        /// Per-request timeout in seconds.
        #[arg(long, default_value_t = 30)]
        timeout: u64,
    },
}

#[derive(Debug)]
enum Failure {
    Data(String),
    Backend(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Data(_) => 2,
            Failure::Backend(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Data(m) | Failure::Backend(m) | Failure::Io(m) => m,
        }
    }
}

impl From<CorpusError> for Failure {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::Io { .. } => Failure::Io(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Io { .. } => Failure::Io(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<EmbedError> for Failure {
    fn from(e: EmbedError) -> Self {
        match e {
            EmbedError::Transport { .. } | EmbedError::Protocol { .. } => Failure::Backend(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<ExtractError> for Failure {
    fn from(e: ExtractError) -> Self {
        match e {
            ExtractError::Embed(inner) => inner.into(),
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<GenError> for Failure {
    fn from(e: GenError) -> Self {
        match e {
            GenError::Transport { .. } => Failure::Backend(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        let msg = e.to_string();
        match e {
            BenchError::Io { .. } => Failure::Io(msg),
            BenchError::Corpus(c) => c.into(),
            BenchError::Extract { source, .. } => match Failure::from(source) {
                Failure::Backend(_) => Failure::Backend(msg),
                _ => Failure::Data(msg),
            },
            BenchError::Generation { source, .. } => match Failure::from(source) {
                Failure::Backend(_) => Failure::Backend(msg),
                _ => Failure::Data(msg),
            },
            _ => Failure::Data(msg),
        }
    }
}

fn io_failure(path: &Path) -> impl FnOnce(io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

/// Prints the effective configuration and its fingerprint to stderr.
fn announce(command: &str, effective: &str) -> String {
    let fp = fingerprint_of(effective);
    eprintln!("vf {command}: {effective}");
    eprintln!("fingerprint: {fp}");
    fp
}

fn load(path: &Path, subwords: Option<&Path>) -> Result<Corpus, Failure> {
    let mut corpus = load_corpus(path, CorpusFormat::Jsonl, &TextPipeline::default())?;
    if let Some(sidecar) = subwords {
        corpus.apply_subword_counts(&load_subword_counts(sidecar)?)?;
    }
    Ok(corpus)
}

fn scoring_setup(subwords: Option<&Path>) -> String {
    let counts = subwords.map_or("estimated".to_owned(), |p| format!("exact({})", p.display()));
    format!("text: {}; subword counts: {counts}; {ROUGE_DESCRIPTION}", TextPipeline::default().describe())
}

fn encoder_for(endpoint: Option<&str>) -> (Box<dyn SentenceEncoder>, EmbedderKind) {
    match endpoint {
        Some(url) => (Box::new(RemoteEmbedder::new(url)), EmbedderKind::Remote),
        None => (Box::new(LexicalEncoder), EmbedderKind::Lexical),
    }
}

#[derive(Serialize)]
struct ExtractRecord<'a> {
    id: &'a str,
    indices: &'a [usize],
    text: &'a str,
    config_fingerprint: &'a str,
}

#[derive(Deserialize)]
struct Candidate {
    id: String,
    text: String,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Ingest { input, validate, subwords } => {
            announce("ingest", &scoring_setup(subwords.as_deref()));
            let corpus = load(&input, subwords.as_deref())?;
            if validate {
                println!("ok: {} triples", corpus.len());
                return Ok(());
            }
            let mut out = BTreeMap::new();
            for d in corpus.datasets() {
                let lengths = analysis::length_stats(&corpus.filter_dataset(&d), &analysis::DEFAULT_BUDGETS)?;
                out.insert(d, serde_json::to_value(lengths).expect("serializable"));
            }
            let summary = serde_json::json!({ "corpus": corpus.name(), "triples": corpus.len(), "datasets": out });
            println!("{}", serde_json::to_string_pretty(&summary).expect("serializable"));
        }
        Command::Analyze { corpus, out, subwords } => {
            announce("analyze", &scoring_setup(subwords.as_deref()));
            let corpus = load(&corpus, subwords.as_deref())?;
            let (csv, md) = analysis::report(&corpus, &out)?;
            println!("{}", csv.display());
            println!("{}", md.display());
        }
        Command::Extract {
            corpus,
            method,
            k,
            selection,
            ordering,
            out,
            embed_endpoint,
        } => {
            let corpus = load(&corpus, None)?;
            let (encoder, kind) = encoder_for(embed_endpoint.as_deref());
            let mut config = ExtractConfig::new(method, k, selection, ordering);
            config.embedder = kind;
            config.validate()?;
            let mut per_dataset = BTreeMap::new();
            for d in corpus.datasets() {
                let run = RunConfig::extractive(d.as_str(), config);
                let fp = announce("extract", &run.effective(corpus.pipeline(), &encoder.label()));
                let k_auto = auto_k(&d, corpus.filter_dataset(&d).mean_verdict_sentences());
                per_dataset.insert(d, (fp, k_auto));
            }
            let mut sink: Box<dyn Write> = if out.as_os_str() == "-" {
                Box::new(io::stdout().lock())
            } else {
                Box::new(BufWriter::new(fs::File::create(&out).map_err(io_failure(&out))?))
            };
            for (triple, seg) in corpus.iter() {
                let (fp, k_auto) = &per_dataset[&triple.dataset];
                let e = extract(&seg.article, &seg.claim, &config, *k_auto, encoder.as_ref())?;
                let record = ExtractRecord {
                    id: &triple.id,
                    indices: &e.indices,
                    text: &e.text,
                    config_fingerprint: fp,
                };
                let line = serde_json::to_string(&record).expect("serializable");
                writeln!(sink, "{line}").map_err(io_failure(&out))?;
            }
            sink.flush().map_err(io_failure(&out))?;
        }
        Command::Score { candidates, corpus } => {
            announce("score", &scoring_setup(None));
            let corpus = load(&corpus, None)?;
            let content = fs::read_to_string(&candidates).map_err(io_failure(&candidates))?;
            let mut parsed = Vec::new();
            for (i, line) in content.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
                let c: Candidate = serde_json::from_str(line)
                    .map_err(|e| Failure::Data(format!("{} line {}: {e}", candidates.display(), i + 1)))?;
                parsed.push(c);
            }
            let scores = score_texts(parsed.iter().map(|c| (c.id.as_str(), c.text.as_str())), &corpus)?;
            let mut summary = serde_json::Map::new();
            for v in RougeVariant::ALL {
                let s = scores.mean.get(v);
                summary.insert(
                    v.to_string(),
                    serde_json::json!({ "precision": s.precision, "recall": s.recall, "f1": s.f1 }),
                );
            }
            summary.insert("scored".into(), scores.scored.into());
            summary.insert("excluded".into(), scores.excluded.into());
            println!("{}", serde_json::to_string_pretty(&summary).expect("serializable"));
        }
        Command::Bench {
            grid,
            corpus_dir,
            out,
            embed_endpoint,
            gen_endpoint,
            jobs,
        } => {
            let spec = GridSpec::load(&grid)?;
            let corpus = bench::load_datasets(&corpus_dir, &spec.datasets, &TextPipeline::default())?;
            let (encoder, kind) = encoder_for(embed_endpoint.as_deref());
            let mut configs = spec.expand();
            for c in &mut configs {
                c.extract.embedder = kind;
            }
            let header = bench::describe_setup(corpus.pipeline(), &encoder.label());
            eprintln!("vf bench: {} cells from {}", configs.len(), grid.display());
            for line in header.lines() {
                eprintln!("  {line}");
            }
            for c in &configs {
                eprintln!("  {}  {}", c.fingerprint(corpus.pipeline(), &encoder.label()), describe_cell(c));
            }
            let mut backends = Backends::new(encoder.as_ref());
            backends.default_gen_endpoint = gen_endpoint;
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let results = bench::run_all(&corpus, &configs, &backends, jobs)?;
            let unreliable = results.iter().filter(|r| r.unreliable).count();
            if unreliable > 0 {
                eprintln!("warning: {unreliable} run(s) excluded more than 10% of triples");
            }
            let (csv, md) = bench::compare(&results, &out, &header)?;
            println!("{}", csv.display());
            println!("{}", md.display());
        }
        Command::Probe { endpoint, timeout } => {
            eprintln!("vf probe: endpoint={endpoint} timeout={timeout}s");
            let report = probe(&endpoint, Duration::from_secs(timeout));
            for c in &report.checks {
                match &c.outcome {
                    Ok(detail) => println!("ok    {}: {detail}", c.name),
                    Err(why) => println!("FAIL  {}: {why}", c.name),
                }
            }
            if let Some(d) = report.dims {
                println!("dims: {d}");
            }
            if !report.passed() {
                return Err(Failure::Backend(format!("{endpoint} does not conform to the protocol")));
            }
        }
    }
    Ok(())
}

fn describe_cell(c: &RunConfig) -> String {
    let mut s = format!("{} {} k={}", c.dataset, c.summary_label(), c.extract.k);
    if let Some(g) = &c.generation {
        s += &format!(" {} {} {} budget={} {}", g.model, g.finetune, g.mode, g.budget, g.decoding.label());
    }
    s
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
