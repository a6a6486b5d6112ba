use std::path::{Path, PathBuf};

use vf_core::text::{split_sentences, tokenize, TextPipeline};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/text").join(name)
}

fn paragraphs() -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(fixture("sentences.txt")).unwrap();
    let mut out = vec![Vec::new()];
    for line in text.lines().filter(|l| !l.starts_with('#')) {
        if line.trim().is_empty() {
            if !out.last().unwrap().is_empty() {
                out.push(Vec::new());
            }
        } else {
            out.last_mut().unwrap().push(line.to_owned());
        }
    }
    out.retain(|p| !p.is_empty());
    out
}

#[test]
fn splitter_matches_annotated_sentences() {
    let paras = paragraphs();
    assert_eq!(paras.iter().map(Vec::len).sum::<usize>(), 40);
    for para in paras {
        let text = para.join(" ");
        let got: Vec<&str> = split_sentences(&text).iter().map(|s| s.slice(&text)).collect();
        assert_eq!(got, para, "paragraph: {text}");
    }
}

#[test]
fn spans_cover_all_non_whitespace() {
    for para in paragraphs() {
        let text = para.join("  \n ");
        let spans = split_sentences(&text);
        assert!(spans.windows(2).all(|w| w[0].end <= w[1].start));
        let covered: usize = spans.iter().map(|s| s.slice(&text).chars().filter(|c| !c.is_whitespace()).count()).sum();
        assert_eq!(covered, text.chars().filter(|c| !c.is_whitespace()).count());
    }
}

#[test]
fn tokenizer_matches_annotated_strings() {
    let text = std::fs::read_to_string(fixture("tokens.tsv")).unwrap();
    let mut n = 0;
    for line in text.lines().filter(|l| !l.starts_with('#')) {
        let (input, expected) = line.rsplit_once('\t').expect("tab-separated row");
        let expected: Vec<&str> = expected.split_whitespace().collect();
        assert_eq!(tokenize(input), expected, "input: {input:?}");
        n += 1;
    }
    assert_eq!(n, 20);
}

#[test]
fn token_count_is_additive_over_a_space() {
    let p = TextPipeline::default();
    for para in paragraphs() {
        let (a, b) = (para[0].as_str(), para.last().unwrap().as_str());
        let joined = format!("{a} {b}");
        assert_eq!(p.segment(&joined).token_count(), p.segment(a).token_count() + p.segment(b).token_count());
    }
}
