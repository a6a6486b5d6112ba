//! Protocol conformance check for a remote embedding/generation server.

use std::time::Duration;

use serde_json::{json, Value};

use crate::embedder::{cosine, http_agent, RemoteEmbedder, Vector};
use crate::genbridge::{DecodingSpec, GenInput, GenMode, GenerationClient};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub outcome: Result<String, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub endpoint: String,
    pub dims: Option<usize>,
    pub checks: Vec<Check>,
}

impl ProbeReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.outcome.is_ok())
    }
}

const SAMPLE: [&str; 3] = [
    "The senator said unemployment fell by half.",
    "Rainfall totals were above average this spring.",
    "The senator said unemployment fell by half.",
];

/// Runs every check against `endpoint`; failures are reported, not returned
/// as errors.
pub fn probe(endpoint: &str, timeout: Duration) -> ProbeReport {
    let endpoint = endpoint.trim_end_matches('/').to_owned();
    let agent = http_agent(timeout);
    let mut checks = Vec::new();
    let mut push = |name, outcome| checks.push(Check { name, outcome });

    push(
        "health",
        agent
            .get(&format!("{endpoint}/health"))
            .call()
            .and_then(|mut r| r.body_mut().read_json::<Value>())
            .map_err(|e| e.to_string())
            .and_then(|v| match v.as_object() {
                Some(o) => Ok(o.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ")),
                None => Err("health response is not a JSON object".into()),
            }),
    );

    let mut embedder = RemoteEmbedder::new(&endpoint);
    embedder.timeout = timeout;
    embedder.retries = 0;
    let texts: Vec<String> = SAMPLE.iter().map(|s| s.to_string()).collect();
    let embedded = embedder.embed(&texts).map_err(|e| e.to_string());
    let dims = embedded.as_ref().ok().and_then(|v| v.first()).map(Vector::dims);
    push("embed", embedded.as_ref().map(|v| format!("{} vectors of {} dims", v.len(), dims.unwrap_or(0))).map_err(Clone::clone));
    if let Ok(v) = &embedded {
        push(
            "embed determinism",
            if v[0] == v[2] { Ok("identical texts give identical vectors".into()) } else { Err("identical texts gave different vectors".into()) },
        );
        push(
            "self cosine",
            cosine(&v[0], &v[0]).map_err(|e| e.to_string()).and_then(|c| {
                if (c - 1.0).abs() <= 1e-6 {
                    Ok(format!("{c}"))
                } else {
                    Err(format!("self cosine is {c}"))
                }
            }),
        );
    }

    let mut client = GenerationClient::new(&endpoint);
    client.timeout = timeout;
    client.retries = 0;
    let input = GenInput {
        triple_id: "probe".into(),
        mode: GenMode::ClaimArticle,
        claim: Some(SAMPLE[0].into()),
        context: SAMPLE[1].into(),
        text: String::new(),
        budget: 1024,
        dropped: 0,
    };
    let beam = DecodingSpec::beam(5);
    let first = client.generate(&input, &beam, 7).map_err(|e| e.to_string());
    push("generate", first.as_ref().map(|r| format!("{} chars", r.text.len())).map_err(Clone::clone));
    if let Ok(first) = &first {
        push(
            "beam determinism",
            client.generate(&input, &beam, 7).map_err(|e| e.to_string()).and_then(|second| {
                if second.text == first.text {
                    Ok("repeat-identical with a fixed seed".into())
                } else {
                    Err("two beam generations with the same seed differ".into())
                }
            }),
        );
    }

    let body = json!({
        "claim": null,
        "context": SAMPLE[1],
        "mode": "article",
        "decoding": { "strategy": "no-such-strategy", "params": {} },
        "seed": 0
    });
    push(
        "unsupported strategy",
        match agent.post(&format!("{endpoint}/generate")).send_json(&body) {
            Err(ureq::Error::StatusCode(422)) => Ok("rejected with 422".into()),
            Err(e) => Err(format!("expected 422, got {e}")),
            Ok(r) => Err(format!("expected 422, got {}", r.status())),
        },
    );

    ProbeReport { endpoint, dims, checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stub::{StubConfig, StubServer};

    #[test]
    fn stub_passes() {
        let server = StubServer::start(StubConfig::default()).unwrap();
        let report = probe(&server.url(), Duration::from_secs(5));
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.dims, Some(64));
        assert_eq!(report.checks.len(), 7);
    }

    #[test]
    fn closed_port_fails() {
        let l = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}", l.local_addr().unwrap());
        drop(l);
        let report = probe(&url, Duration::from_secs(2));
        assert!(!report.passed());
        assert_eq!(report.dims, None);
    }
}
