//! Extractive reduction: truncation, LexRank centrality and claim-driven
//! ranking, plus top/bottom selection and article/ranking ordering.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedder::{cosine, EmbedError, LexicalModel, SentenceEncoder};
use crate::published::{benchmark_of, Benchmark};
use crate::text::SegmentedDoc;

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("article has no sentences")]
    EmptyArticle,
    #[error("invalid extraction config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Embed(#[from] EmbedError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Truncation,
    LexRank,
    ClaimDriven,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Truncation, Method::LexRank, Method::ClaimDriven];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Truncation => "truncation",
            Method::LexRank => "lexrank",
            Method::ClaimDriven => "claimdriven",
        }
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "truncation" => Ok(Method::Truncation),
            "lexrank" => Ok(Method::LexRank),
            "claimdriven" | "claim-driven" | "claim" | "sbert" => Ok(Method::ClaimDriven),
            other => Err(format!("unknown method `{other}` (expected truncation, lexrank or claimdriven)")),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Best-ranked (`top`, a.k.a. head) or worst-ranked (`bottom`, a.k.a. tail) sentences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selection {
    Top,
    Bottom,
}

impl Selection {
    pub fn as_str(self) -> &'static str {
        match self {
            Selection::Top => "top",
            Selection::Bottom => "bottom",
        }
    }
}

impl FromStr for Selection {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "top" | "head" => Ok(Selection::Top),
            "bottom" | "tail" => Ok(Selection::Bottom),
            other => Err(format!("unknown selection `{other}` (expected top or bottom)")),
        }
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Emission order of the selected sentences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentenceOrder {
    /// Original document position.
    Article,
    /// Rank position, best first.
    Ranking,
}

impl SentenceOrder {
    pub fn as_str(self) -> &'static str {
        match self {
            SentenceOrder::Article => "article",
            SentenceOrder::Ranking => "ranking",
        }
    }
}

impl FromStr for SentenceOrder {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "article" => Ok(SentenceOrder::Article),
            "ranking" => Ok(SentenceOrder::Ranking),
            other => Err(format!("unknown ordering `{other}` (expected article or ranking)")),
        }
    }
}

impl fmt::Display for SentenceOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Number of sentences to extract.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentenceCount {
    Fixed(usize),
    /// Mean verdict length of the dataset; see [`auto_k`].
    Auto,
}

impl SentenceCount {
    pub fn resolve(self, auto: usize) -> usize {
        match self {
            SentenceCount::Fixed(k) => k,
            SentenceCount::Auto => auto,
        }
    }
}

impl FromStr for SentenceCount {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(SentenceCount::Auto);
        }
        match s.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(SentenceCount::Fixed(k)),
            _ => Err(format!("invalid sentence count `{s}` (expected a positive integer or auto)")),
        }
    }
}

impl fmt::Display for SentenceCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SentenceCount::Fixed(k) => write!(f, "{k}"),
            SentenceCount::Auto => f.write_str("auto"),
        }
    }
}

/// Extraction length for `k = auto`: 2 sentences for FullFact, 6 for LIAR++,
/// otherwise the rounded mean verdict sentence count (at least 1).
pub fn auto_k(dataset: &str, mean_verdict_sentences: f64) -> usize {
    match benchmark_of(dataset) {
        Some(Benchmark::FullFact) => 2,
        Some(Benchmark::LiarPlusPlus) => 6,
        None => (mean_verdict_sentences.round() as usize).max(1),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LexRankParams {
    pub damping: f64,
    pub tolerance: f64,
    pub max_iters: usize,
}

impl Default for LexRankParams {
    fn default() -> Self {
        LexRankParams {
            damping: 0.85,
            tolerance: 1e-6,
            max_iters: 100,
        }
    }
}

/// Which sentence encoder a claim-driven config expects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbedderKind {
    Lexical,
    Remote,
}

impl EmbedderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EmbedderKind::Lexical => "lexical",
            EmbedderKind::Remote => "remote",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractConfig {
    pub method: Method,
    pub k: SentenceCount,
    pub selection: Selection,
    pub ordering: SentenceOrder,
    pub lexrank: LexRankParams,
    pub embedder: EmbedderKind,
}

impl ExtractConfig {
    pub fn new(method: Method, k: SentenceCount, selection: Selection, ordering: SentenceOrder) -> Self {
        ExtractConfig {
            method,
            k,
            selection,
            ordering,
            lexrank: LexRankParams::default(),
            embedder: EmbedderKind::Lexical,
        }
    }

    pub fn validate(&self) -> Result<(), ExtractError> {
        if self.k == SentenceCount::Fixed(0) {
            return Err(ExtractError::InvalidConfig("k must be at least 1".into()));
        }
        let p = &self.lexrank;
        if !(p.damping > 0.0 && p.damping < 1.0) {
            return Err(ExtractError::InvalidConfig(format!("damping {} is outside (0, 1)", p.damping)));
        }
        if !(p.tolerance > 0.0) || p.max_iters == 0 {
            return Err(ExtractError::InvalidConfig(
                "lexrank tolerance and max_iters must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Compact label, e.g. `lexrank/top/article/k=auto`.
    pub fn label(&self) -> String {
        format!("{}/{}/{}/k={}", self.method, self.selection, self.ordering, self.k)
    }
}

/// Sentence indices, best first, with aligned scores.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub order: Vec<usize>,
    pub scores: Vec<f64>,
    pub method: Method,
}

impl Ranking {
    /// Sorts by descending score, ties by smaller index.
    fn from_scores(scores_by_index: Vec<f64>, method: Method) -> Self {
        let mut order: Vec<usize> = (0..scores_by_index.len()).collect();
        // Scores are compared on a 1e-10 grid so float noise from scaling or
        // summation order does not reorder what are really ties.
        let key = |i: usize| (scores_by_index[i] * 1e10).round();
        order.sort_by(|&a, &b| key(b).total_cmp(&key(a)).then(a.cmp(&b)));
        let scores = order.iter().map(|&i| scores_by_index[i]).collect();
        Ranking { order, scores, method }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Scores indexed by sentence position.
    pub fn scores_by_index(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.order.len()];
        for (&i, &s) in self.order.iter().zip(&self.scores) {
            out[i] = s;
        }
        out
    }
}

/// Document order; positional scores `S - i`.
pub fn rank_truncation(article: &SegmentedDoc) -> Result<Ranking, ExtractError> {
    let s = article.sentence_count();
    if s == 0 {
        return Err(ExtractError::EmptyArticle);
    }
    Ok(Ranking {
        order: (0..s).collect(),
        scores: (0..s).map(|i| (s - i) as f64).collect(),
        method: Method::Truncation,
    })
}

/// Row-stochastic, damped transition matrix of the continuous LexRank graph.
///
/// Edge weights are cosines of TF-IDF vectors fit on the article's own
/// sentences; there are no self-loops. Rows with no similarity mass are uniform.
pub fn lexrank_matrix(article: &SegmentedDoc, damping: f64) -> Vec<Vec<f64>> {
    let s = article.sentence_count();
    let sentences: Vec<&[String]> = (0..s).map(|i| article.sentence_words(i)).collect();
    let owned: Vec<Vec<&str>> = sentences.iter().map(|w| w.iter().map(String::as_str).collect()).collect();
    let vectors = LexicalModel::fit(&owned)
        .ok()
        .map(|m| owned.iter().map(|w| m.embed(w)).collect::<Vec<_>>());

    let teleport = (1.0 - damping) / s as f64;
    (0..s)
        .map(|i| {
            let sims: Vec<f64> = match &vectors {
                Some(v) => (0..s)
                    .map(|j| if i == j { 0.0 } else { cosine(&v[i], &v[j]).unwrap_or(0.0).max(0.0) })
                    .collect(),
                None => vec![0.0; s],
            };
            let total: f64 = sims.iter().sum();
            sims.iter()
                .map(|&w| {
                    let walk = if total > 0.0 { w / total } else { 1.0 / s as f64 };
                    damping * walk + teleport
                })
                .collect()
        })
        .collect()
}

/// Stationary distribution of the LexRank walk by power iteration from the
/// uniform vector. Stops when successive iterates differ by less than the
/// tolerance in L∞, or after `max_iters` steps.
pub fn lexrank_scores(article: &SegmentedDoc, params: &LexRankParams) -> Vec<f64> {
    let s = article.sentence_count();
    if s == 0 {
        return Vec::new();
    }
    let p = lexrank_matrix(article, params.damping);
    let mut dist = vec![1.0 / s as f64; s];
    for _ in 0..params.max_iters {
        let mut next = vec![0.0; s];
        for (i, row) in p.iter().enumerate() {
            for (j, &pij) in row.iter().enumerate() {
                next[j] += dist[i] * pij;
            }
        }
        let delta = dist.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        dist = next;
        if delta < params.tolerance {
            break;
        }
    }
    let total: f64 = dist.iter().sum();
    dist.iter().map(|x| x / total).collect()
}

pub fn rank_lexrank(article: &SegmentedDoc, params: &LexRankParams) -> Result<Ranking, ExtractError> {
    if article.sentence_count() == 0 {
        return Err(ExtractError::EmptyArticle);
    }
    Ok(Ranking::from_scores(lexrank_scores(article, params), Method::LexRank))
}

/// Ranks sentences by cosine similarity to the claim.
pub fn rank_claim(
    article: &SegmentedDoc,
    claim: &SegmentedDoc,
    encoder: &dyn SentenceEncoder,
) -> Result<Ranking, ExtractError> {
    if article.sentence_count() == 0 {
        return Err(ExtractError::EmptyArticle);
    }
    let (claim_vec, sentence_vecs) = encoder.encode(claim, article)?;
    if sentence_vecs.len() != article.sentence_count() {
        return Err(ExtractError::Embed(EmbedError::Protocol {
            endpoint: encoder.label(),
            reason: format!(
                "{} vectors for {} sentences",
                sentence_vecs.len(),
                article.sentence_count()
            ),
        }));
    }
    let scores = sentence_vecs
        .iter()
        .map(|v| cosine(&claim_vec, v))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Ranking::from_scores(scores, Method::ClaimDriven))
}

/// Selected sentences of one article.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extract {
    pub indices: Vec<usize>,
    pub sentences: Vec<String>,
    /// Sentences joined by single spaces.
    pub text: String,
    pub config: ExtractConfig,
}

pub fn rank(
    article: &SegmentedDoc,
    claim: &SegmentedDoc,
    config: &ExtractConfig,
    encoder: &dyn SentenceEncoder,
) -> Result<Ranking, ExtractError> {
    match config.method {
        Method::Truncation => rank_truncation(article),
        Method::LexRank => rank_lexrank(article, &config.lexrank),
        Method::ClaimDriven => rank_claim(article, claim, encoder),
    }
}

/// Picks `k` sentences from a ranking and orders them.
///
/// `top` takes the first `k` of the ranking; `bottom` takes the last `k`, kept
/// in ascending rank position (so descending score, as for `top`).
pub fn select(ranking: &Ranking, k: usize, selection: Selection, ordering: SentenceOrder) -> Vec<usize> {
    let k = k.min(ranking.len());
    let mut chosen: Vec<usize> = match selection {
        Selection::Top => ranking.order[..k].to_vec(),
        Selection::Bottom => ranking.order[ranking.len() - k..].to_vec(),
    };
    if ordering == SentenceOrder::Article {
        chosen.sort_unstable();
    }
    chosen
}

/// Runs the configured method and selection. `auto_k` is used when
/// `config.k` is [`SentenceCount::Auto`].
pub fn extract(
    article: &SegmentedDoc,
    claim: &SegmentedDoc,
    config: &ExtractConfig,
    auto_k: usize,
    encoder: &dyn SentenceEncoder,
) -> Result<Extract, ExtractError> {
    config.validate()?;
    let k = config.k.resolve(auto_k);
    if k == 0 {
        return Err(ExtractError::InvalidConfig("resolved k is 0".into()));
    }
    let ranking = rank(article, claim, config, encoder)?;
    let indices = select(&ranking, k, config.selection, config.ordering);
    let sentences: Vec<String> = indices.iter().map(|&i| article.sentence_text(i).to_owned()).collect();
    Ok(Extract {
        text: sentences.join(" "),
        indices,
        sentences,
        config: *config,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedder::{LexicalEncoder, Vector};
    use crate::text::TextPipeline;
    use proptest::prelude::*;

    fn doc(text: &str) -> SegmentedDoc {
        TextPipeline::default().segment(text)
    }

    const FIVE: &str = "Alpha one here. Beta two here. Gamma three here. Delta four here. Epsilon five here.";

    fn cfg(method: Method, k: usize, sel: Selection, ord: SentenceOrder) -> ExtractConfig {
        ExtractConfig::new(method, SentenceCount::Fixed(k), sel, ord)
    }

    #[test]
    fn truncation_head_and_tail() {
        let a = doc(FIVE);
        let c = doc("Claim.");
        let head = extract(&a, &c, &cfg(Method::Truncation, 2, Selection::Top, SentenceOrder::Article), 0, &LexicalEncoder).unwrap();
        assert_eq!(head.indices, [0, 1]);
        let tail = extract(&a, &c, &cfg(Method::Truncation, 2, Selection::Bottom, SentenceOrder::Article), 0, &LexicalEncoder).unwrap();
        assert_eq!(tail.indices, [3, 4]);
        assert_eq!(tail.text, "Delta four here. Epsilon five here.");
        let all = extract(&a, &c, &cfg(Method::Truncation, 10, Selection::Top, SentenceOrder::Article), 0, &LexicalEncoder).unwrap();
        assert_eq!(all.indices, [0, 1, 2, 3, 4]);
        let r = rank_truncation(&a).unwrap();
        assert_eq!(r.scores, [5.0, 4.0, 3.0, 2.0, 1.0]);
    }

    #[test]
    fn empty_article_is_an_error() {
        assert!(matches!(rank_truncation(&doc("  ")), Err(ExtractError::EmptyArticle)));
        assert!(matches!(
            rank_lexrank(&doc(""), &LexRankParams::default()),
            Err(ExtractError::EmptyArticle)
        ));
    }

    #[test]
    fn lexrank_identical_sentences_split_mass() {
        let r = rank_lexrank(&doc("Same words here. Same words here."), &LexRankParams::default()).unwrap();
        assert_eq!(r.order, [0, 1]);
        assert!((r.scores[0] - 0.5).abs() < 1e-12);
        assert!((r.scores[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn lexrank_single_sentence() {
        let r = rank_lexrank(&doc("Only one sentence."), &LexRankParams::default()).unwrap();
        assert_eq!(r.scores, [1.0]);
    }

    #[test]
    fn lexrank_prefers_central_sentence() {
        let a = doc("Cats eat fish. Dogs eat meat. Cats and dogs eat fish and meat. Stars shine bright.");
        let r = rank_lexrank(&a, &LexRankParams::default()).unwrap();
        assert_eq!(r.order[0], 2);
        assert_eq!(*r.order.last().unwrap(), 3);
        let sum: f64 = r.scores.iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn claim_verbatim_sentence_ranks_first() {
        let a = doc("The mayor opened a park. Taxes rose by ten percent last year. Residents were unhappy.");
        let c = doc("Taxes rose by ten percent last year.");
        let r = rank_claim(&a, &c, &LexicalEncoder).unwrap();
        assert_eq!(r.order[0], 1);
        assert!((r.scores[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn claim_ties_break_by_position() {
        let a = doc("Same thing. Same thing. Same thing.");
        let r = rank_claim(&a, &doc("Unrelated words."), &LexicalEncoder).unwrap();
        assert_eq!(r.order, [0, 1, 2]);
    }

    #[test]
    fn planted_near_duplicate_wins() {
        let a = doc(
            "The council met on Tuesday. Weather was mild across the region. \
             Officials said unemployment fell to four percent in March. \
             The governor claimed unemployment fell to four percent. \
             Schools reopened after the break. Traffic was heavy downtown.",
        );
        let c = doc("Unemployment fell to four percent, the governor claimed.");
        let (cv, sv) = LexicalEncoder.encode(&c, &a).unwrap();
        let cos: Vec<f64> = sv.iter().map(|v| cosine(&cv, v).unwrap()).collect();
        let best = (0..cos.len()).max_by(|&x, &y| cos[x].total_cmp(&cos[y])).unwrap();
        assert_eq!(best, 3);
        assert_eq!(rank_claim(&a, &c, &LexicalEncoder).unwrap().order[0], 3);
    }

    #[test]
    fn auto_k_values() {
        assert_eq!(auto_k("fullfact", 9.0), 2);
        assert_eq!(auto_k("FF", 9.0), 2);
        assert_eq!(auto_k("liarpp", 1.0), 6);
        assert_eq!(auto_k("L++", 1.0), 6);
        assert_eq!(auto_k("other", 3.4), 3);
        assert_eq!(auto_k("other", 0.2), 1);
    }

    #[test]
    fn full_article_when_k_exceeds_length() {
        let a = doc(FIVE);
        for m in Method::ALL {
            let e = extract(&a, &doc("Gamma three."), &cfg(m, 9, Selection::Top, SentenceOrder::Article), 0, &LexicalEncoder).unwrap();
            assert_eq!(e.text, FIVE);
        }
    }

    #[test]
    fn ordering_changes_sequence_not_set() {
        let a = doc("Stars shine. Cats eat fish. Dogs eat meat. Cats and dogs eat fish and meat.");
        let c = doc("x");
        let art = extract(&a, &c, &cfg(Method::LexRank, 3, Selection::Top, SentenceOrder::Article), 0, &LexicalEncoder).unwrap();
        let rnk = extract(&a, &c, &cfg(Method::LexRank, 3, Selection::Top, SentenceOrder::Ranking), 0, &LexicalEncoder).unwrap();
        let mut sorted = rnk.indices.clone();
        sorted.sort();
        assert_eq!(art.indices, sorted);
        assert_ne!(art.indices, rnk.indices);
    }

    #[test]
    fn bottom_ranking_keeps_descending_scores() {
        let r = Ranking::from_scores(vec![0.1, 0.5, 0.3, 0.05, 0.05], Method::LexRank);
        assert_eq!(r.order, [1, 2, 0, 3, 4]);
        assert_eq!(select(&r, 2, Selection::Bottom, SentenceOrder::Ranking), [3, 4]);
        assert_eq!(select(&r, 3, Selection::Bottom, SentenceOrder::Ranking), [0, 3, 4]);
        assert_eq!(select(&r, 3, Selection::Bottom, SentenceOrder::Article), [0, 3, 4]);
        assert_eq!(select(&r, 2, Selection::Top, SentenceOrder::Ranking), [1, 2]);
    }

    #[test]
    fn invalid_configs() {
        let a = doc(FIVE);
        let mut c = cfg(Method::LexRank, 2, Selection::Top, SentenceOrder::Article);
        c.lexrank.damping = 1.0;
        assert!(matches!(extract(&a, &a, &c, 0, &LexicalEncoder), Err(ExtractError::InvalidConfig(_))));
        let c = cfg(Method::LexRank, 0, Selection::Top, SentenceOrder::Article);
        assert!(c.validate().is_err());
        let auto = ExtractConfig::new(Method::LexRank, SentenceCount::Auto, Selection::Top, SentenceOrder::Article);
        assert!(extract(&a, &a, &auto, 0, &LexicalEncoder).is_err());
    }

    #[test]
    fn parse_names() {
        assert_eq!("sbert".parse::<Method>().unwrap(), Method::ClaimDriven);
        assert_eq!("tail".parse::<Selection>().unwrap(), Selection::Bottom);
        assert_eq!("auto".parse::<SentenceCount>().unwrap(), SentenceCount::Auto);
        assert!("0".parse::<SentenceCount>().is_err());
        assert!("middle".parse::<Selection>().is_err());
        assert!("textrank".parse::<Method>().is_err());
    }

    struct Scaled(f64);

    impl SentenceEncoder for Scaled {
        fn encode(&self, claim: &SegmentedDoc, article: &SegmentedDoc) -> Result<(Vector, Vec<Vector>), EmbedError> {
            let (c, s) = LexicalEncoder.encode(claim, article)?;
            Ok((c.scaled(self.0), s.into_iter().map(|v| v.scaled(self.0 * 3.0)).collect()))
        }
        fn label(&self) -> String {
            "scaled".into()
        }
    }

    fn article_strategy() -> impl Strategy<Value = String> {
        let word = prop::sample::select(vec!["tax", "vote", "cut", "rate", "job", "farm", "city", "law", "fund"]);
        let sentence = prop::collection::vec(word, 1..6).prop_map(|w| {
            let mut s = w.join(" ");
            s[..1].make_ascii_uppercase();
            s + "."
        });
        prop::collection::vec(sentence, 1..9).prop_map(|s| s.join(" "))
    }

    proptest! {
        #[test]
        fn lexrank_is_a_distribution(text in article_strategy()) {
            let a = doc(&text);
            let r = rank_lexrank(&a, &LexRankParams::default()).unwrap();
            prop_assert!(r.scores.iter().all(|&x| x >= 0.0));
            prop_assert!((r.scores.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(r.scores.windows(2).all(|w| w[0] >= w[1] - 1e-9));
        }

        #[test]
        fn claim_ranking_scale_invariant(text in article_strategy(), claim in article_strategy(), f in 0.1f64..50.0) {
            let a = doc(&text);
            let c = doc(&claim);
            let base = rank_claim(&a, &c, &LexicalEncoder).unwrap();
            let scaled = rank_claim(&a, &c, &Scaled(f)).unwrap();
            prop_assert_eq!(base.order, scaled.order);
        }

        #[test]
        fn top_set_independent_of_ordering(text in article_strategy(), claim in article_strategy(), k in 1usize..6) {
            let a = doc(&text);
            let c = doc(&claim);
            for m in Method::ALL {
                let art = extract(&a, &c, &cfg(m, k, Selection::Top, SentenceOrder::Article), 0, &LexicalEncoder).unwrap();
                let rnk = extract(&a, &c, &cfg(m, k, Selection::Top, SentenceOrder::Ranking), 0, &LexicalEncoder).unwrap();
                let mut set = rnk.indices.clone();
                set.sort();
                prop_assert_eq!(&art.indices, &set);
                prop_assert!(art.indices.windows(2).all(|w| w[0] < w[1]));
                prop_assert_eq!(art.indices.len(), k.min(a.sentence_count()));
                let again = extract(&a, &c, &cfg(m, k, Selection::Top, SentenceOrder::Ranking), 0, &LexicalEncoder).unwrap();
                prop_assert_eq!(rnk, again);
            }
        }
    }
}
