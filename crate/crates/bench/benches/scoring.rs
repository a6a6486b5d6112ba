use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vf_bench::{article, tokens};
use vf_core::rouge::{rouge_l, rouge_n, score_all};
use vf_core::text::TextPipeline;

fn rouge(c: &mut Criterion) {
    let mut group = c.benchmark_group("rouge");
    for len in [100, 1_000] {
        let mut rng = ChaCha8Rng::seed_from_u64(len as u64);
        let cand = tokens(&mut rng, len);
        let reference = tokens(&mut rng, len / 4);
        group.throughput(Throughput::Elements(len as u64));
        group.bench_with_input(BenchmarkId::new("r2", len), &len, |b, _| {
            b.iter(|| rouge_n(black_box(&cand), black_box(&reference), 2).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("rl", len), &len, |b, _| {
            b.iter(|| rouge_l(black_box(&cand), black_box(&reference)))
        });
        group.bench_with_input(BenchmarkId::new("all", len), &len, |b, _| {
            b.iter(|| score_all(black_box(&cand), black_box(&reference)))
        });
    }
    group.finish();
}

fn segment(c: &mut Criterion) {
    let pipeline = TextPipeline::default();
    let text = article(1, 40);
    let mut group = c.benchmark_group("text");
    group.throughput(Throughput::Bytes(text.len() as u64));
    group.bench_function("segment 40 sentences", |b| b.iter(|| pipeline.segment(black_box(&text))));
    group.finish();
}

criterion_group!(benches, rouge, segment);
criterion_main!(benches);
