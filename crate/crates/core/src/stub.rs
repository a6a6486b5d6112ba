//! In-process HTTP server speaking the `/embed` and `/generate` protocols.
//!
//! Used by the test suites and for offline protocol checks. Embeddings are
//! feature-hashed bags of lowercase tokens, so identical texts always map to
//! bitwise-identical vectors.

use std::net::SocketAddr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::Duration;

use serde::Deserialize;
use serde_json::json;
use tiny_http::{Header, Method, Response, Server};

use crate::text::tokenize;

/// What `/generate` answers with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenerateBehavior {
    /// The request's `context`.
    EchoContext,
    /// The request's `claim` (empty when absent).
    EchoClaim,
    Fixed(String),
    /// Always an empty string.
    Empty,
}

#[derive(Clone, Debug)]
pub struct StubConfig {
    pub dims: usize,
    pub generate: GenerateBehavior,
    /// Upper bound of a per-request delay derived from the request body, to
    /// make response timing differ from request order.
    pub max_delay: Duration,
    pub workers: usize,
}

impl Default for StubConfig {
    fn default() -> Self {
        StubConfig {
            dims: 64,
            generate: GenerateBehavior::EchoContext,
            max_delay: Duration::ZERO,
            workers: 8,
        }
    }
}

#[derive(Debug, Default)]
pub struct StubStats {
    pub embed_requests: AtomicUsize,
    pub generate_requests: AtomicUsize,
}

pub struct StubServer {
    server: Arc<Server>,
    addr: SocketAddr,
    stats: Arc<StubStats>,
    workers: Vec<JoinHandle<()>>,
}

const STRATEGIES: [&str; 4] = ["beam", "topk", "nucleus", "typical"];

#[derive(Deserialize)]
struct EmbedBody {
    texts: Vec<String>,
}

#[derive(Deserialize)]
struct GenerateBody {
    claim: Option<String>,
    context: String,
    mode: String,
    decoding: DecodingBody,
    #[allow(dead_code)]
    seed: i64,
}

#[derive(Deserialize)]
struct DecodingBody {
    strategy: String,
    #[allow(dead_code)]
    params: serde_json::Map<String, serde_json::Value>,
}

impl StubServer {
    /// Binds to an ephemeral localhost port.
    pub fn start(config: StubConfig) -> std::io::Result<StubServer> {
        let server = Server::http("127.0.0.1:0").map_err(std::io::Error::other)?;
        let addr = server
            .server_addr()
            .to_ip()
            .ok_or_else(|| std::io::Error::other("stub server has no ip address"))?;
        let server = Arc::new(server);
        let stats = Arc::new(StubStats::default());
        let config = Arc::new(config);
        let workers = (0..config.workers.max(1))
            .map(|_| {
                let server = Arc::clone(&server);
                let stats = Arc::clone(&stats);
                let config = Arc::clone(&config);
                thread::spawn(move || {
                    for request in server.incoming_requests() {
                        handle(request, &config, &stats);
                    }
                })
            })
            .collect();
        Ok(StubServer {
            server,
            addr,
            stats,
            workers,
        })
    }

    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn stats(&self) -> &StubStats {
        &self.stats
    }

    pub fn embed_requests(&self) -> usize {
        self.stats.embed_requests.load(Ordering::SeqCst)
    }

    pub fn generate_requests(&self) -> usize {
        self.stats.generate_requests.load(Ordering::SeqCst)
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        for _ in &self.workers {
            self.server.unblock();
        }
        for w in self.workers.drain(..) {
            let _ = w.join();
        }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Feature-hashed token counts with a sign bit.
pub fn hashed_embedding(text: &str, dims: usize) -> Vec<f64> {
    let mut v = vec![0.0; dims];
    for tok in tokenize(text) {
        let h = fnv1a(tok.as_bytes());
        let sign = if h >> 63 == 0 { 1.0 } else { -1.0 };
        v[(h % dims as u64) as usize] += sign;
    }
    v
}

fn json_response(status: u16, body: serde_json::Value) -> Response<std::io::Cursor<Vec<u8>>> {
    let header = Header::from_bytes("Content-Type", "application/json").expect("static header");
    Response::from_string(body.to_string())
        .with_status_code(status)
        .with_header(header)
}

fn handle(mut request: tiny_http::Request, config: &StubConfig, stats: &StubStats) {
    let mut body = String::new();
    let read = request.as_reader().read_to_string(&mut body);
    let response = match (read, request.method(), request.url()) {
        (Err(e), _, _) => json_response(400, json!({ "error": e.to_string() })),
        (Ok(_), Method::Get, "/health") => json_response(
            200,
            json!({ "embedding_model": "stub-hashing", "generation_model": format!("stub-{:?}", config.generate) }),
        ),
        (Ok(_), Method::Post, "/embed") => {
            stats.embed_requests.fetch_add(1, Ordering::SeqCst);
            delay(config, &body);
            match serde_json::from_str::<EmbedBody>(&body) {
                Ok(req) => {
                    let vectors: Vec<Vec<f64>> = req.texts.iter().map(|t| hashed_embedding(t, config.dims)).collect();
                    json_response(200, json!({ "dims": config.dims, "vectors": vectors }))
                }
                Err(e) => json_response(400, json!({ "error": e.to_string() })),
            }
        }
        (Ok(_), Method::Post, "/generate") => {
            stats.generate_requests.fetch_add(1, Ordering::SeqCst);
            delay(config, &body);
            match serde_json::from_str::<GenerateBody>(&body) {
                Ok(req) if !STRATEGIES.contains(&req.decoding.strategy.as_str()) => json_response(
                    422,
                    json!({ "error": format!("unsupported strategy `{}`", req.decoding.strategy) }),
                ),
                Ok(req) if req.mode != "article" && req.mode != "claim_article" => {
                    json_response(422, json!({ "error": format!("unsupported mode `{}`", req.mode) }))
                }
                Ok(req) => {
                    let text = match &config.generate {
                        GenerateBehavior::EchoContext => req.context,
                        GenerateBehavior::EchoClaim => req.claim.unwrap_or_default(),
                        GenerateBehavior::Fixed(s) => s.clone(),
                        GenerateBehavior::Empty => String::new(),
                    };
                    json_response(200, json!({ "text": text }))
                }
                Err(e) => json_response(400, json!({ "error": e.to_string() })),
            }
        }
        (Ok(_), _, _) => json_response(404, json!({ "error": "not found" })),
    };
    let _ = request.respond(response);
}

fn delay(config: &StubConfig, body: &str) {
    let max = config.max_delay.as_millis() as u64;
    if max > 0 {
        thread::sleep(Duration::from_millis(fnv1a(body.as_bytes()) % (max + 1)));
    }
}
