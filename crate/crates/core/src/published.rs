//! Published corpus statistics and extractive scores for the LIAR++ and
//! FullFact benchmarks. Reports print them next to locally computed values;
//! they are never used as pass/fail thresholds.

use crate::analysis::{Ablation, PairKind};
use crate::corpus::Field;
use crate::extractive::Method;

/// Canonical benchmark name for a dataset tag, if it is one of the two.
pub fn benchmark_of(dataset: &str) -> Option<Benchmark> {
    let tag: String = dataset
        .to_ascii_lowercase()
        .chars()
        .filter(|c| c.is_ascii_alphanumeric() || *c == '+')
        .collect();
    match tag.as_str() {
        "liarpp" | "liar++" | "l++" | "lpp" | "liarplusplus" => Some(Benchmark::LiarPlusPlus),
        "ff" | "fullfact" => Some(Benchmark::FullFact),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Benchmark {
    LiarPlusPlus,
    FullFact,
}

/// Mean sentences, word tokens and subword tokens per element.
pub fn lengths(b: Benchmark, field: Field) -> (f64, f64, f64) {
    match (b, field) {
        (Benchmark::LiarPlusPlus, Field::Article) => (38.9, 817.8, 1131.7),
        (Benchmark::LiarPlusPlus, Field::Claim) => (1.2, 17.9, 24.9),
        (Benchmark::LiarPlusPlus, Field::Verdict) => (6.3, 113.7, 150.4),
        (Benchmark::FullFact, Field::Article) => (24.8, 632.1, 803.5),
        (Benchmark::FullFact, Field::Claim) => (1.0, 15.0, 20.3),
        (Benchmark::FullFact, Field::Verdict) => (1.9, 30.4, 39.04),
    }
}

/// Fraction of articles above 512 and 1024 subword tokens.
pub fn article_exceedance(b: Benchmark) -> (f64, f64) {
    match b {
        Benchmark::LiarPlusPlus => (0.98, 0.54),
        Benchmark::FullFact => (0.66, 0.24),
    }
}

/// Published (R1, R2, RL) recall for an overlap table cell, where reported.
pub fn overlap_recall(b: Benchmark, pair: PairKind, ablation: Ablation) -> Option<[f64; 3]> {
    use Ablation::*;
    use Benchmark::*;
    use PairKind::*;
    Some(match (b, pair, ablation) {
        (LiarPlusPlus, VerdictArticle, Complete) => [0.678, 0.272, 0.426],
        (FullFact, VerdictArticle, Complete) => [0.724, 0.355, 0.547],
        (LiarPlusPlus, ClaimVerdict, Complete) => [0.709, 0.532, 0.648],
        (LiarPlusPlus, ClaimVerdict, NoFirst) => [0.394, 0.130, 0.302],
        (LiarPlusPlus, ClaimVerdict, NoLast) => [0.702, 0.527, 0.643],
        (FullFact, ClaimVerdict, Complete) => [0.311, 0.099, 0.257],
        (FullFact, ClaimVerdict, NoFirst) => [0.247, 0.074, 0.208],
        (FullFact, ClaimVerdict, NoLast) => [0.192, 0.061, 0.165],
        (LiarPlusPlus, ClaimArticle, Complete) => [0.875, 0.706, 0.810],
        (LiarPlusPlus, ClaimArticle, NoFirst) => [0.862, 0.689, 0.791],
        (LiarPlusPlus, ClaimArticle, NoLast) => [0.874, 0.704, 0.808],
        (FullFact, ClaimArticle, Complete) => [0.785, 0.426, 0.661],
        (FullFact, ClaimArticle, NoFirst) => [0.739, 0.351, 0.612],
        (FullFact, ClaimArticle, NoLast) => [0.779, 0.421, 0.655],
        _ => return None,
    })
}

/// Published (R1, R2, RL) F1 of verdict-article overlap.
pub fn verdict_article_f1(b: Benchmark) -> [f64; 3] {
    match b {
        Benchmark::LiarPlusPlus => [0.168, 0.067, 0.103],
        Benchmark::FullFact => [0.093, 0.045, 0.068],
    }
}

/// Published extractive (R1, R2, RL) F1; `top` is head/top, otherwise tail/bottom.
pub fn extractive_f1(b: Benchmark, method: Method, top: bool) -> [f64; 3] {
    use Benchmark::*;
    use Method::*;
    match (b, method, top) {
        (FullFact, Truncation, true) => [0.258, 0.082, 0.182],
        (FullFact, Truncation, false) => [0.216, 0.047, 0.149],
        (FullFact, LexRank, true) => [0.267, 0.083, 0.180],
        (FullFact, LexRank, false) => [0.219, 0.050, 0.153],
        (FullFact, ClaimDriven, true) => [0.300, 0.114, 0.213],
        (FullFact, ClaimDriven, false) => [0.178, 0.030, 0.132],
        (LiarPlusPlus, Truncation, true) => [0.347, 0.120, 0.196],
        (LiarPlusPlus, Truncation, false) => [0.313, 0.061, 0.157],
        (LiarPlusPlus, LexRank, true) => [0.373, 0.120, 0.194],
        (LiarPlusPlus, LexRank, false) => [0.302, 0.056, 0.154],
        (LiarPlusPlus, ClaimDriven, true) => [0.393, 0.158, 0.237],
        (LiarPlusPlus, ClaimDriven, false) => [0.245, 0.029, 0.131],
    }
}
