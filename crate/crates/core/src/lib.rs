//! Extractive and generative justification toolkit for fact-checking corpora.

pub mod analysis;
pub mod bench;
pub mod corpus;
pub mod embedder;
pub mod extractive;
pub mod genbridge;
pub mod probe;
pub mod published;
pub mod rouge;
pub mod stub;
pub mod text;

pub use analysis::{Ablation, AnalysisReport, PairKind};
pub use bench::{expand_grid, GridSpec, RunConfig, RunResult, Stage};
pub use corpus::{load_corpus, Corpus, CorpusError, CorpusFormat, Field, Triple};
pub use embedder::{EmbedError, LexicalEncoder, RemoteEmbedder, SentenceEncoder, Vector};
pub use extractive::{extract, Extract, ExtractConfig, Method, Ranking, Selection, SentenceCount, SentenceOrder};
pub use genbridge::{assemble_input, score_texts, DecodingSpec, GenMode, GenerationClient, Strategy};
pub use rouge::{RougeScore, RougeSet, RougeVariant};
pub use text::{SegmentedDoc, SentenceSplitter, TextPipeline};
