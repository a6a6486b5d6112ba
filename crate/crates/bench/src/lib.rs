//! Seeded synthetic workloads shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vf_core::corpus::{Corpus, Triple};
use vf_core::text::TextPipeline;

const VOCAB: [&str; 24] = [
    "the", "state", "budget", "rose", "fell", "percent", "officials", "said", "report", "tax", "school", "city",
    "voters", "claim", "record", "data", "year", "jobs", "rate", "county", "plan", "law", "cost", "million",
];

pub fn tokens(rng: &mut ChaCha8Rng, n: usize) -> Vec<String> {
    (0..n).map(|_| VOCAB[rng.random_range(0..VOCAB.len())].to_owned()).collect()
}

pub fn sentence(rng: &mut ChaCha8Rng) -> String {
    let len = rng.random_range(6..=24);
    let mut s = tokens(rng, len).join(" ");
    s[..1].make_ascii_uppercase();
    s + "."
}

pub fn article(seed: u64, sentences: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..sentences).map(|_| sentence(&mut rng)).collect::<Vec<_>>().join(" ")
}

/// `n` triples tagged `dataset`, each with an article of `sentences` sentences.
pub fn corpus(dataset: &str, n: usize, sentences: usize) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64 * 31 + sentences as u64);
    let triples = (0..n)
        .map(|i| Triple {
            id: format!("{dataset}-{i:05}"),
            dataset: dataset.to_owned(),
            claim: sentence(&mut rng),
            article: (0..sentences).map(|_| sentence(&mut rng)).collect::<Vec<_>>().join(" "),
            verdict: (0..3).map(|_| sentence(&mut rng)).collect::<Vec<_>>().join(" "),
            truth_label: None,
        })
        .collect();
    Corpus::from_triples(dataset, triples, &TextPipeline::default()).expect("synthetic triples are valid")
}
