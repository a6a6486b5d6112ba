use std::net::TcpListener;
use std::path::Path;
use std::time::{Duration, Instant};

use vf_core::analysis::overlap_stats;
use vf_core::bench::{self, Backends, RunConfig};
use vf_core::corpus::{load_corpus, Corpus, CorpusFormat};
use vf_core::embedder::{cosine, EmbedError, LexicalEncoder, RemoteEmbedder, SentenceEncoder};
use vf_core::extractive::{extract, ExtractConfig, Method, Selection, SentenceCount, SentenceOrder};
use vf_core::genbridge::{
    assemble_input, score_generations, DecodingSpec, GenError, GenMode, GenerationClient, Strategy,
};
use vf_core::stub::{GenerateBehavior, StubConfig, StubServer};
use vf_core::text::TextPipeline;
use vf_core::{Ablation, PairKind, RougeVariant};

fn stub(generate: GenerateBehavior, max_delay_ms: u64) -> StubServer {
    StubServer::start(StubConfig {
        generate,
        max_delay: Duration::from_millis(max_delay_ms),
        ..StubConfig::default()
    })
    .unwrap()
}

fn closed_port() -> String {
    let l = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = l.local_addr().unwrap();
    drop(l);
    format!("http://{addr}")
}

fn fixture_corpus() -> Corpus {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/analysis/lpp_style.jsonl");
    load_corpus(&path, CorpusFormat::Jsonl, &TextPipeline::default()).unwrap()
}

#[test]
fn embed_batches_and_keeps_order() {
    let server = stub(GenerateBehavior::EchoContext, 15);
    let texts: Vec<String> = (0..100).map(|i| format!("sentence number {i} about topic {}", i % 7)).collect();
    let e = RemoteEmbedder::new(server.url());
    let vectors = e.embed(&texts).unwrap();
    assert_eq!(server.embed_requests(), 4);
    assert_eq!(vectors.len(), 100);
    // each vector must be the one for its own text despite out-of-order responses
    let single = RemoteEmbedder::new(server.url());
    for i in [0, 31, 32, 63, 64, 99] {
        let alone = single.embed(&texts[i..=i]).unwrap();
        assert_eq!(alone[0], vectors[i], "text {i}");
    }
}

#[test]
fn identical_texts_embed_identically() {
    let server = stub(GenerateBehavior::EchoContext, 0);
    let e = RemoteEmbedder::new(server.url());
    let v = e.embed(&["The budget rose.".into(), "Unrelated words.".into(), "The budget rose.".into()]).unwrap();
    assert_eq!(v[0], v[2]);
    assert!((cosine(&v[0], &v[0]).unwrap() - 1.0).abs() < 1e-6);
    assert!(e.embed(&[]).unwrap().is_empty());
}

#[test]
fn unreachable_embed_endpoint_is_a_transport_error() {
    let mut e = RemoteEmbedder::new(closed_port());
    e.backoff = Duration::from_millis(5);
    let start = Instant::now();
    let err = e.embed(&["x".into()]).unwrap_err();
    assert!(matches!(err, EmbedError::Transport { batch: 0, .. }), "{err}");
    // two retries with 5 ms and 10 ms backoff
    assert!(start.elapsed() >= Duration::from_millis(15));
}

#[test]
fn remote_encoder_ranks_verbatim_claim_first() {
    let server = stub(GenerateBehavior::EchoContext, 0);
    let p = TextPipeline::default();
    let article = p.segment("Rain fell all day. Taxes doubled under the mayor. The parade was cancelled.");
    let claim = p.segment("Taxes doubled under the mayor.");
    let cfg = ExtractConfig::new(Method::ClaimDriven, SentenceCount::Fixed(1), Selection::Top, SentenceOrder::Article);
    let remote = RemoteEmbedder::new(server.url());
    assert!(remote.label().contains(&server.url()));
    let e = extract(&article, &claim, &cfg, 0, &remote).unwrap();
    assert_eq!(e.indices, [1]);
}

fn inputs(corpus: &Corpus, mode: GenMode) -> Vec<vf_core::genbridge::GenInput> {
    let cfg = ExtractConfig::new(Method::Truncation, SentenceCount::Fixed(2), Selection::Top, SentenceOrder::Article);
    corpus
        .iter()
        .map(|(t, seg)| {
            let e = extract(&seg.article, &seg.claim, &cfg, 0, &LexicalEncoder).unwrap();
            assemble_input(&t.id, &t.claim, &e, mode, 1024, corpus.pipeline()).unwrap()
        })
        .collect()
}

#[test]
fn generation_results_follow_input_order() {
    let server = stub(GenerateBehavior::EchoContext, 25);
    let corpus = fixture_corpus();
    let ins = &inputs(&corpus, GenMode::ClaimArticle)[..3];
    let mut client = GenerationClient::new(server.url());
    client.max_in_flight = 3;
    let out = client.generate_all(ins, &DecodingSpec::beam(5), 0);
    assert_eq!(server.generate_requests(), 3);
    for (i, r) in ins.iter().zip(out) {
        let r = r.unwrap();
        assert_eq!(r.triple_id, i.triple_id);
        assert_eq!(r.text, i.context);
        assert_eq!(r.decoding.params["num_beams"], 5.0);
    }
}

#[test]
fn unsupported_strategy_is_rejected_by_server() {
    let server = stub(GenerateBehavior::EchoContext, 0);
    let corpus = fixture_corpus();
    let input = &inputs(&corpus, GenMode::Article)[0];
    // the stub only knows beam/topk/nucleus/typical; craft an off-protocol body
    let agent = ureq::Agent::new_with_defaults();
    let resp = agent
        .post(&format!("{}/generate", server.url()))
        .send_json(serde_json::json!({
            "claim": null, "context": input.context, "mode": "article",
            "decoding": {"strategy": "greedy", "params": {}}, "seed": 0
        }));
    assert!(matches!(resp, Err(ureq::Error::StatusCode(422))), "{resp:?}");
    let ok = GenerationClient::new(server.url()).generate(input, &DecodingSpec::default_for(Strategy::Typical), 1);
    assert!(ok.is_ok());
}

#[test]
fn unreachable_generation_endpoint_names_the_triple() {
    let corpus = fixture_corpus();
    let input = &inputs(&corpus, GenMode::Article)[0];
    let mut client = GenerationClient::new(closed_port());
    client.backoff = Duration::from_millis(1);
    match client.generate(input, &DecodingSpec::beam(5), 0) {
        Err(GenError::Transport { id, .. }) => assert_eq!(id, input.triple_id),
        other => panic!("expected transport error, got {other:?}"),
    }
}

#[test]
fn empty_generations_are_flagged_and_excluded() {
    let server = stub(GenerateBehavior::Empty, 0);
    let corpus = fixture_corpus();
    let out: Vec<_> = GenerationClient::new(server.url())
        .generate_all(&inputs(&corpus, GenMode::Article), &DecodingSpec::nucleus(0.9), 0)
        .into_iter()
        .map(Result::unwrap)
        .collect();
    assert!(out.iter().all(|r| r.empty));
    assert!(matches!(score_generations(&out, &corpus), Err(GenError::NothingToScore { excluded: 12 })));
}

#[test]
fn claim_echo_reproduces_claim_verdict_overlap() {
    let server = stub(GenerateBehavior::EchoClaim, 5);
    let corpus = fixture_corpus();
    let out: Vec<_> = GenerationClient::new(server.url())
        .generate_all(&inputs(&corpus, GenMode::ClaimArticle), &DecodingSpec::beam(5), 0)
        .into_iter()
        .map(Result::unwrap)
        .collect();
    let gen = score_generations(&out, &corpus).unwrap();
    let analysis = overlap_stats(&corpus, PairKind::ClaimVerdict, Ablation::Complete).unwrap();
    for (i, v) in RougeVariant::ALL.into_iter().enumerate() {
        // the claim is the candidate here and the reference in the analysis
        assert!((gen.mean.get(v).f1 - analysis.f1[i]).abs() < 1e-12, "{v}");
        assert!((gen.mean.get(v).precision - analysis.recall[i]).abs() < 1e-12, "{v}");
    }
}

#[test]
fn bench_generation_through_echo_equals_extractive_scores() {
    let server = stub(GenerateBehavior::EchoContext, 0);
    let corpus = fixture_corpus();
    let grid = format!(
        "[axes]\ndataset = [\"lpp_style\"]\nsummary = [\"lexrank/top/article\"]\nfinetune = [\"article\"]\ndecoding = [\"beam\"]\n\
         [[axes.model]]\nlabel = \"echo\"\nendpoint = \"{}\"\n",
        server.url()
    );
    let configs = bench::expand_grid(&grid).unwrap();
    let backends = Backends::new(&LexicalEncoder);
    let generated = bench::run(&corpus, &configs[0], &backends).unwrap();
    let plain = bench::run(&corpus, &RunConfig::extractive("lpp_style", configs[0].extract), &backends).unwrap();
    assert_eq!(generated.scores, plain.scores);
    assert_eq!(server.generate_requests(), corpus.len());
    assert_ne!(generated.fingerprint, plain.fingerprint);
}

#[test]
fn bench_flags_runs_with_many_exclusions() {
    let server = stub(GenerateBehavior::Fixed("Not a verdict at all.".into()), 0);
    let corpus = fixture_corpus();
    let grid = "[axes]\ndataset = [\"lpp_style\"]\nsummary = [\"truncation/head\"]\nfinetune = [\"claim_article\"]\n\
                decoding = [\"topk\"]\n[[axes.model]]\nlabel = \"tiny\"\nbudget = 30\n";
    let configs = bench::expand_grid(grid).unwrap();
    let mut backends = Backends::new(&LexicalEncoder);
    backends.default_gen_endpoint = Some(server.url());
    let r = bench::run(&corpus, &configs[0], &backends).unwrap();
    assert!(r.excluded > 0);
    assert_eq!(r.unreliable, r.excluded * 10 > corpus.len());
    assert_eq!(r.triples + r.excluded, corpus.len());
}
