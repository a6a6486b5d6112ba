use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use vf_bench::article;
use vf_core::embedder::LexicalEncoder;
use vf_core::extractive::{rank_claim, rank_lexrank, LexRankParams};
use vf_core::text::TextPipeline;

fn lexrank(c: &mut Criterion) {
    let pipeline = TextPipeline::default();
    let params = LexRankParams::default();
    let mut group = c.benchmark_group("lexrank");
    for sentences in [10, 40, 80] {
        let doc = pipeline.segment(&article(sentences as u64, sentences));
        group.bench_with_input(BenchmarkId::from_parameter(sentences), &doc, |b, doc| {
            b.iter(|| rank_lexrank(black_box(doc), &params).unwrap())
        });
    }
    group.finish();
}

fn claim_driven(c: &mut Criterion) {
    let pipeline = TextPipeline::default();
    let claim = pipeline.segment("The state budget rose ten percent last year, officials said.");
    let mut group = c.benchmark_group("claim_driven");
    for sentences in [10, 40, 80] {
        let doc = pipeline.segment(&article(sentences as u64 + 7, sentences));
        group.bench_with_input(BenchmarkId::from_parameter(sentences), &doc, |b, doc| {
            b.iter(|| rank_claim(black_box(doc), &claim, &LexicalEncoder).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, lexrank, claim_driven);
criterion_main!(benches);
