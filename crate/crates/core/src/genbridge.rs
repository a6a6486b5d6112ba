//! Budgeted generator inputs, the `POST /generate` client, and scoring of
//! generated verdicts.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Corpus;
use crate::embedder::{http_agent, with_retries};
use crate::extractive::Extract;
use crate::rouge::{score_all, RougeSet};
use crate::text::{tokenize, TextPipeline};

pub const CLAIM_MARKER: &str = "claim:";
pub const CONTEXT_MARKER: &str = "context:";

#[derive(Debug, Error)]
pub enum GenError {
    #[error("extract for `{0}` is empty")]
    EmptyExtract(String),
    #[error("budget of {budget} subwords for `{id}` cannot hold {needed} (claim plus one sentence)")]
    BudgetTooSmall { id: String, budget: usize, needed: usize },
    #[error("invalid decoding spec: {0}")]
    InvalidDecoding(String),
    #[error("generation for `{id}` at {endpoint} failed: {reason}")]
    Transport {
        id: String,
        endpoint: String,
        reason: String,
    },
    #[error("generated verdict for unknown id `{0}`")]
    UnknownId(String),
    #[error("no generations left to score after excluding {excluded} empty results")]
    NothingToScore { excluded: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenMode {
    Article,
    ClaimArticle,
}

impl GenMode {
    pub fn as_str(self) -> &'static str {
        match self {
            GenMode::Article => "article",
            GenMode::ClaimArticle => "claim_article",
        }
    }
}

impl FromStr for GenMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "article" => Ok(GenMode::Article),
            "claim_article" | "claim+article" => Ok(GenMode::ClaimArticle),
            other => Err(format!("unknown input mode `{other}` (expected article or claim_article)")),
        }
    }
}

impl fmt::Display for GenMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Generator input for one triple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenInput {
    pub triple_id: String,
    pub mode: GenMode,
    /// Claim text, present in `claim_article` mode.
    pub claim: Option<String>,
    /// The retained extract sentences joined by spaces.
    pub context: String,
    /// Full assembled text: `claim: <claim> context: <context>` or the context alone.
    pub text: String,
    pub budget: usize,
    /// Extract sentences removed from the end to fit the budget.
    pub dropped: usize,
}

fn render(mode: GenMode, claim: &str, context: &str) -> String {
    match mode {
        GenMode::Article => context.to_owned(),
        GenMode::ClaimArticle => format!("{CLAIM_MARKER} {claim} {CONTEXT_MARKER} {context}"),
    }
}

/// Builds the generator input, dropping whole sentences from the end of the
/// extract until the estimated subword count fits `budget`. The claim is
/// never shortened.
pub fn assemble_input(
    triple_id: &str,
    claim: &str,
    extract: &Extract,
    mode: GenMode,
    budget: usize,
    pipeline: &TextPipeline,
) -> Result<GenInput, GenError> {
    if extract.sentences.is_empty() {
        return Err(GenError::EmptyExtract(triple_id.to_owned()));
    }
    let claim = claim.trim();
    let mut keep = extract.sentences.len();
    loop {
        let context = extract.sentences[..keep].join(" ");
        let text = render(mode, claim, &context);
        if pipeline.estimate(&text) <= budget {
            return Ok(GenInput {
                triple_id: triple_id.to_owned(),
                mode,
                claim: (mode == GenMode::ClaimArticle).then(|| claim.to_owned()),
                context,
                text,
                budget,
                dropped: extract.sentences.len() - keep,
            });
        }
        if keep == 1 {
            return Err(GenError::BudgetTooSmall {
                id: triple_id.to_owned(),
                budget,
                needed: pipeline.estimate(&text),
            });
        }
        keep -= 1;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Beam,
    TopK,
    Nucleus,
    Typical,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Beam => "beam",
            Strategy::TopK => "topk",
            Strategy::Nucleus => "nucleus",
            Strategy::Typical => "typical",
        }
    }
}

impl FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "beam" => Ok(Strategy::Beam),
            "topk" | "top-k" => Ok(Strategy::TopK),
            "nucleus" | "top-p" => Ok(Strategy::Nucleus),
            "typical" => Ok(Strategy::Typical),
            other => Err(format!("unknown decoding strategy `{other}`")),
        }
    }
}

/// Decoding strategy plus its parameters, forwarded opaquely to the server.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodingSpec {
    pub strategy: Strategy,
    pub params: BTreeMap<String, f64>,
}

impl DecodingSpec {
    pub fn beam(width: usize) -> Self {
        Self::with(Strategy::Beam, "num_beams", width as f64)
    }

    pub fn top_k(k: usize) -> Self {
        Self::with(Strategy::TopK, "top_k", k as f64)
    }

    pub fn nucleus(p: f64) -> Self {
        Self::with(Strategy::Nucleus, "top_p", p)
    }

    pub fn typical(p: f64) -> Self {
        Self::with(Strategy::Typical, "typical_p", p)
    }

    /// The defaults used for each strategy: 5 beams, top-40, p = 0.9, typical p = 0.95.
    pub fn default_for(strategy: Strategy) -> Self {
        match strategy {
            Strategy::Beam => Self::beam(5),
            Strategy::TopK => Self::top_k(40),
            Strategy::Nucleus => Self::nucleus(0.9),
            Strategy::Typical => Self::typical(0.95),
        }
    }

    fn with(strategy: Strategy, key: &str, value: f64) -> Self {
        DecodingSpec {
            strategy,
            params: BTreeMap::from([(key.to_owned(), value)]),
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let check = |key: &str, ok: fn(f64) -> bool, rule: &str| match self.params.get(key) {
            Some(&v) if !ok(v) => Err(GenError::InvalidDecoding(format!("{key} = {v} violates {rule}"))),
            _ => Ok(()),
        };
        check("num_beams", |v| v >= 1.0 && v.fract() == 0.0, "integer >= 1")?;
        check("top_k", |v| v >= 1.0 && v.fract() == 0.0, "integer >= 1")?;
        check("top_p", |v| v > 0.0 && v <= 1.0, "0 < p <= 1")?;
        check("typical_p", |v| v > 0.0 && v <= 1.0, "0 < p <= 1")?;
        Ok(())
    }

    pub fn label(&self) -> String {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{}({})", self.strategy.as_str(), params.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenResult {
    pub triple_id: String,
    pub text: String,
    pub decoding: DecodingSpec,
    pub endpoint: String,
    /// Set when the generation has no word tokens; such results are
    /// excluded from means.
    pub empty: bool,
}

#[derive(Serialize)]
struct GenerateRequest<'a> {
    claim: Option<&'a str>,
    context: &'a str,
    mode: GenMode,
    decoding: &'a DecodingSpec,
    seed: i64,
}

#[derive(Deserialize)]
struct GenerateResponse {
    text: String,
}

/// Blocking client for `POST /generate`.
#[derive(Clone, Debug)]
pub struct GenerationClient {
    endpoint: String,
    pub retries: usize,
    pub max_in_flight: usize,
    pub backoff: Duration,
    pub timeout: Duration,
}

impl GenerationClient {
    pub fn new(endpoint: impl Into<String>) -> Self {
        GenerationClient {
            endpoint: endpoint.into().trim_end_matches('/').to_owned(),
            retries: 2,
            max_in_flight: 2,
            backoff: Duration::from_millis(100),
            timeout: Duration::from_secs(300),
        }
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    pub fn generate(&self, input: &GenInput, decoding: &DecodingSpec, seed: i64) -> Result<GenResult, GenError> {
        self.generate_with(&http_agent(self.timeout), input, decoding, seed)
    }

    fn generate_with(
        &self,
        agent: &ureq::Agent,
        input: &GenInput,
        decoding: &DecodingSpec,
        seed: i64,
    ) -> Result<GenResult, GenError> {
        decoding.validate()?;
        let url = format!("{}/generate", self.endpoint);
        let body = GenerateRequest {
            claim: input.claim.as_deref(),
            context: &input.context,
            mode: input.mode,
            decoding,
            seed,
        };
        let resp: GenerateResponse = with_retries(self.retries, self.backoff, || {
            agent
                .post(&url)
                .send_json(&body)
                .and_then(|mut r| r.body_mut().read_json::<GenerateResponse>())
        })
        .map_err(|e| GenError::Transport {
            id: input.triple_id.clone(),
            endpoint: self.endpoint.clone(),
            reason: e.to_string(),
        })?;
        Ok(GenResult {
            triple_id: input.triple_id.clone(),
            empty: tokenize(&resp.text).is_empty(),
            text: resp.text,
            decoding: decoding.clone(),
            endpoint: self.endpoint.clone(),
        })
    }

    /// Generates for every input with at most `max_in_flight` concurrent
    /// requests. Results come back in input order.
    pub fn generate_all(
        &self,
        inputs: &[GenInput],
        decoding: &DecodingSpec,
        seed: i64,
    ) -> Vec<Result<GenResult, GenError>> {
        let agent = http_agent(self.timeout);
        let slots: Mutex<Vec<Option<Result<GenResult, GenError>>>> =
            Mutex::new((0..inputs.len()).map(|_| None).collect());
        let next = Mutex::new(0usize);
        thread::scope(|scope| {
            for _ in 0..self.max_in_flight.max(1).min(inputs.len()) {
                scope.spawn(|| loop {
                    let idx = {
                        let mut n = next.lock().unwrap();
                        let idx = *n;
                        *n += 1;
                        idx
                    };
                    let Some(input) = inputs.get(idx) else { break };
                    let res = self.generate_with(&agent, input, decoding, seed);
                    slots.lock().unwrap()[idx] = Some(res);
                });
            }
        });
        slots
            .into_inner()
            .unwrap()
            .into_iter()
            .map(|r| r.expect("every input is processed"))
            .collect()
    }
}

/// Mean ROUGE of generated verdicts against gold verdicts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenScores {
    pub mean: RougeSet,
    pub scored: usize,
    pub excluded: usize,
}

/// Scores each non-empty generation against its gold verdict. Per-triple
/// scores are averaged in id order so the mean does not depend on input order.
pub fn score_generations(results: &[GenResult], corpus: &Corpus) -> Result<GenScores, GenError> {
    score_texts(results.iter().map(|r| (r.triple_id.as_str(), r.text.as_str())), corpus)
}

/// Scores `(triple id, candidate text)` pairs against the gold verdicts.
/// Candidates without any word token are excluded and counted.
pub fn score_texts<'a>(
    candidates: impl IntoIterator<Item = (&'a str, &'a str)>,
    corpus: &Corpus,
) -> Result<GenScores, GenError> {
    let mut per_triple: Vec<(&str, RougeSet)> = Vec::new();
    let mut excluded = 0;
    for (id, text) in candidates {
        let (_, seg) = corpus.get(id).ok_or_else(|| GenError::UnknownId(id.to_owned()))?;
        let tokens = tokenize(text);
        if tokens.is_empty() {
            excluded += 1;
            continue;
        }
        per_triple.push((id, score_all(&tokens, seg.verdict.words())));
    }
    if per_triple.is_empty() {
        return Err(GenError::NothingToScore { excluded });
    }
    per_triple.sort_by(|a, b| a.0.cmp(b.0));
    let sets: Vec<RougeSet> = per_triple.into_iter().map(|(_, s)| s).collect();
    Ok(GenScores {
        mean: RougeSet::mean(&sets).expect("non-empty"),
        scored: sets.len(),
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extractive::{ExtractConfig, Method, Selection, SentenceCount, SentenceOrder};

    fn extract_of(sentences: &[&str]) -> Extract {
        Extract {
            indices: (0..sentences.len()).collect(),
            sentences: sentences.iter().map(|s| s.to_string()).collect(),
            text: sentences.join(" "),
            config: ExtractConfig::new(
                Method::Truncation,
                SentenceCount::Fixed(sentences.len()),
                Selection::Top,
                SentenceOrder::Article,
            ),
        }
    }

    #[test]
    fn fitting_extract_is_unchanged() {
        let p = TextPipeline::default();
        let e = extract_of(&["One two three.", "Four five."]);
        let a = assemble_input("x", "Is it true?", &e, GenMode::ClaimArticle, 512, &p).unwrap();
        assert_eq!(a.text, "claim: Is it true? context: One two three. Four five.");
        assert_eq!(a.dropped, 0);
        let b = assemble_input("x", "Is it true?", &e, GenMode::Article, 512, &p).unwrap();
        assert_eq!(b.text, e.text);
        assert_eq!(b.claim, None);
    }

    #[test]
    fn over_budget_drops_tail_sentences() {
        let p = TextPipeline::with_calibration(1.0);
        // six sentences of 4 tokens each; article mode needs 4 per kept sentence
        let e = extract_of(&["S0 a b c.", "S1 a b c.", "S2 a b c.", "S3 a b c.", "S4 a b c.", "S5 a b c."]);
        let a = assemble_input("x", "c", &e, GenMode::Article, 17, &p).unwrap();
        assert_eq!(a.dropped, 2);
        assert_eq!(a.context, "S0 a b c. S1 a b c. S2 a b c. S3 a b c.");
        assert!(p.estimate(&a.text) <= 17);
    }

    #[test]
    fn budget_below_claim_plus_sentence_errors() {
        let p = TextPipeline::with_calibration(1.0);
        let e = extract_of(&["One two three four."]);
        let err = assemble_input("x", "A long claim text here", &e, GenMode::ClaimArticle, 6, &p).unwrap_err();
        assert!(matches!(err, GenError::BudgetTooSmall { .. }));
    }

    #[test]
    fn decoding_defaults_and_validation() {
        let beam = DecodingSpec::default_for(Strategy::Beam);
        assert_eq!(beam.params["num_beams"], 5.0);
        assert_eq!(DecodingSpec::default_for(Strategy::TopK).params["top_k"], 40.0);
        assert_eq!(DecodingSpec::default_for(Strategy::Nucleus).params["top_p"], 0.9);
        assert_eq!(DecodingSpec::default_for(Strategy::Typical).params["typical_p"], 0.95);
        assert!(DecodingSpec::beam(0).validate().is_err());
        assert!(DecodingSpec::nucleus(1.5).validate().is_err());
        assert!(DecodingSpec::nucleus(1.0).validate().is_ok());
        let body = serde_json::to_value(GenerateRequest {
            claim: None,
            context: "c",
            mode: GenMode::Article,
            decoding: &beam,
            seed: 1,
        })
        .unwrap();
        assert_eq!(body["decoding"]["params"]["num_beams"], 5.0);
        assert_eq!(body["decoding"]["strategy"], "beam");
        assert_eq!(body["mode"], "article");
        assert!(body["claim"].is_null());
    }
}
