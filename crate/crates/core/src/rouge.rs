//! ROUGE-1, ROUGE-2 and ROUGE-L over token sequences.
//!
//! N-gram overlap is clipped (multiset intersection). ROUGE-L is computed at
//! summary level: one LCS over the full flattened token sequences.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RougeError {
    #[error("n-gram order must be at least 1, got {0}")]
    InvalidOrder(usize),
    #[error("only unigram and bigram overlap are scored, got n = {0}")]
    UnsupportedOrder(usize),
    #[error("cannot aggregate an empty list of scores")]
    Empty,
    #[error("cannot aggregate mixed variants {0} and {1}")]
    MixedVariants(RougeVariant, RougeVariant),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RougeVariant {
    R1,
    R2,
    RL,
}

impl RougeVariant {
    pub const ALL: [RougeVariant; 3] = [RougeVariant::R1, RougeVariant::R2, RougeVariant::RL];
}

impl fmt::Display for RougeVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RougeVariant::R1 => "R1",
            RougeVariant::R2 => "R2",
            RougeVariant::RL => "RL",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RougeScore {
    pub variant: RougeVariant,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl RougeScore {
    /// Builds a score from precision and recall, deriving F1.
    pub fn from_pr(variant: RougeVariant, precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        RougeScore {
            variant,
            precision,
            recall,
            f1,
        }
    }

    pub fn zero(variant: RougeVariant) -> Self {
        RougeScore {
            variant,
            precision: 0.0,
            recall: 0.0,
            f1: 0.0,
        }
    }
}

fn ngram_counts<T: Eq + Hash>(tokens: &[T], n: usize) -> HashMap<&[T], usize> {
    let mut counts = HashMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

/// ROUGE-N with clipped counts, for `n` in {1, 2}.
pub fn rouge_n<T: Eq + Hash>(candidate: &[T], reference: &[T], n: usize) -> Result<RougeScore, RougeError> {
    let variant = match n {
        0 => return Err(RougeError::InvalidOrder(0)),
        1 => RougeVariant::R1,
        2 => RougeVariant::R2,
        n => return Err(RougeError::UnsupportedOrder(n)),
    };
    if candidate.len() < n || reference.len() < n {
        return Ok(RougeScore::zero(variant));
    }
    let cand = ngram_counts(candidate, n);
    let refs = ngram_counts(reference, n);
    let overlap: usize = refs
        .iter()
        .map(|(gram, &rc)| cand.get(gram).map_or(0, |&cc| cc.min(rc)))
        .sum();
    let cand_total = candidate.len() + 1 - n;
    let ref_total = reference.len() + 1 - n;
    Ok(RougeScore::from_pr(
        variant,
        overlap as f64 / cand_total.max(1) as f64,
        overlap as f64 / ref_total.max(1) as f64,
    ))
}

/// Length of the longest common subsequence, in O(|a|·|b|) time and
/// O(min(|a|, |b|)) memory.
pub fn lcs_length<T: Eq>(a: &[T], b: &[T]) -> usize {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if short.is_empty() {
        return 0;
    }
    let mut row = vec![0usize; short.len() + 1];
    for x in long {
        let mut diag = 0;
        for (j, y) in short.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[short.len()]
}

pub fn rouge_l<T: Eq>(candidate: &[T], reference: &[T]) -> RougeScore {
    if candidate.is_empty() || reference.is_empty() {
        return RougeScore::zero(RougeVariant::RL);
    }
    let l = lcs_length(candidate, reference) as f64;
    RougeScore::from_pr(
        RougeVariant::RL,
        l / candidate.len() as f64,
        l / reference.len() as f64,
    )
}

/// R1, R2 and RL of one candidate/reference pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RougeSet {
    pub r1: RougeScore,
    pub r2: RougeScore,
    pub rl: RougeScore,
}

impl RougeSet {
    pub fn get(&self, variant: RougeVariant) -> &RougeScore {
        match variant {
            RougeVariant::R1 => &self.r1,
            RougeVariant::R2 => &self.r2,
            RougeVariant::RL => &self.rl,
        }
    }

    /// Component-wise mean of non-empty `sets`.
    pub fn mean(sets: &[RougeSet]) -> Result<RougeSet, RougeError> {
        let pick = |v: RougeVariant| -> Result<RougeScore, RougeError> {
            aggregate(&sets.iter().map(|s| *s.get(v)).collect::<Vec<_>>())
        };
        Ok(RougeSet {
            r1: pick(RougeVariant::R1)?,
            r2: pick(RougeVariant::R2)?,
            rl: pick(RougeVariant::RL)?,
        })
    }
}

pub fn score_all<T: Eq + Hash>(candidate: &[T], reference: &[T]) -> RougeSet {
    RougeSet {
        r1: rouge_n(candidate, reference, 1).expect("order 1 is valid"),
        r2: rouge_n(candidate, reference, 2).expect("order 2 is valid"),
        rl: rouge_l(candidate, reference),
    }
}

/// Arithmetic mean of precision, recall and F1, each independently.
pub fn aggregate(scores: &[RougeScore]) -> Result<RougeScore, RougeError> {
    let first = scores.first().ok_or(RougeError::Empty)?;
    if let Some(other) = scores.iter().find(|s| s.variant != first.variant) {
        return Err(RougeError::MixedVariants(first.variant, other.variant));
    }
    let n = scores.len() as f64;
    let mean = |f: fn(&RougeScore) -> f64| scores.iter().map(f).sum::<f64>() / n;
    Ok(RougeScore {
        variant: first.variant,
        precision: mean(|s| s.precision),
        recall: mean(|s| s.recall),
        f1: mean(|s| s.f1),
    })
}
