use std::collections::HashMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{AgentEndpoint, AgentError, PromptBundle, Provider};

/// Sends one prompt and returns the model's raw text.
pub trait Transport: Send + Sync {
    fn complete(&self, endpoint: &AgentEndpoint, bundle: &PromptBundle) -> Result<String, AgentError>;
}

/// Minimal chat-completion POST over HTTPS.
#[derive(Debug, Default, Clone, Copy)]
pub struct HttpTransport;

fn classify(err: ureq::Error) -> AgentError {
    match err {
        ureq::Error::Timeout(t) => AgentError::Timeout(t.to_string()),
        ureq::Error::StatusCode(429) => AgentError::RateLimited("status 429".into()),
        ureq::Error::StatusCode(status) => AgentError::Http {
            status,
            body: String::new(),
        },
        other => AgentError::Network(other.to_string()),
    }
}

fn extract_text(provider: Provider, body: &Value) -> Result<String, AgentError> {
    let text = match provider {
        Provider::OpenAi => body.pointer("/choices/0/message/content").and_then(Value::as_str),
        Provider::Anthropic => body.pointer("/content/0/text").and_then(Value::as_str),
    };
    text.map(str::to_string)
        .ok_or_else(|| AgentError::Protocol(format!("no completion text in {body}")))
}

impl Transport for HttpTransport {
    fn complete(&self, endpoint: &AgentEndpoint, bundle: &PromptBundle) -> Result<String, AgentError> {
        let key = endpoint.credential()?;
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(endpoint.timeout_ms)))
            .http_status_as_error(false)
            .build()
            .into();
        let base = endpoint.base_url.trim_end_matches('/');
        let messages = json!([{ "role": "user", "content": bundle.text }]);
        let response = match endpoint.provider {
            Provider::OpenAi => agent
                .post(format!("{base}/chat/completions"))
                .header("authorization", format!("Bearer {key}"))
                .send_json(json!({
                    "model": endpoint.model,
                    "max_tokens": endpoint.token_budget,
                    "messages": messages,
                })),
            Provider::Anthropic => agent
                .post(format!("{base}/v1/messages"))
                .header("x-api-key", &key)
                .header("anthropic-version", "2023-06-01")
                .send_json(json!({
                    "model": endpoint.model,
                    "max_tokens": endpoint.token_budget,
                    "messages": messages,
                })),
        };
        let mut response = response.map_err(classify)?;
        let status = response.status().as_u16();
        let body = response.body_mut().read_to_string().map_err(classify)?;
        match status {
            200..=299 => {
                let v: Value = serde_json::from_str(&body).map_err(|e| AgentError::Protocol(e.to_string()))?;
                extract_text(endpoint.provider, &v)
            }
            429 => Err(AgentError::RateLimited(body)),
            _ => Err(AgentError::Http { status, body }),
        }
    }
}

type ReplyFn = dyn Fn(&PromptBundle) -> Result<String, AgentError> + Send + Sync;

/// Answers with a closure; the standard offline stand-in for a provider.
pub struct MockTransport(Box<ReplyFn>);

impl MockTransport {
    pub fn new(f: impl Fn(&PromptBundle) -> Result<String, AgentError> + Send + Sync + 'static) -> Self {
        MockTransport(Box::new(f))
    }

    pub fn constant(reply: impl Into<String>) -> Self {
        let reply = reply.into();
        MockTransport::new(move |_| Ok(reply.clone()))
    }
}

impl Transport for MockTransport {
    fn complete(&self, _endpoint: &AgentEndpoint, bundle: &PromptBundle) -> Result<String, AgentError> {
        (self.0)(bundle)
    }
}

/// Returns scripted replies in order, then repeats the last one.
pub struct ScriptedTransport {
    replies: Vec<Result<String, AgentError>>,
    next: AtomicUsize,
}

impl ScriptedTransport {
    pub fn new(replies: Vec<Result<String, AgentError>>) -> Self {
        assert!(!replies.is_empty(), "at least one scripted reply");
        ScriptedTransport {
            replies,
            next: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.next.load(Ordering::SeqCst)
    }
}

impl Transport for ScriptedTransport {
    fn complete(&self, _endpoint: &AgentEndpoint, _bundle: &PromptBundle) -> Result<String, AgentError> {
        let i = self.next.fetch_add(1, Ordering::SeqCst);
        self.replies[i.min(self.replies.len() - 1)].clone()
    }
}

/// One recorded exchange: the bundle's hash and the reply it received.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureEntry {
    pub bundle_hash: String,
    pub raw_reply: String,
}

/// Replays recorded replies keyed by [`PromptBundle::bundle_hash`].
#[derive(Debug, Clone, Default)]
pub struct FixtureTransport {
    replies: HashMap<String, String>,
}

impl FixtureTransport {
    pub fn new(entries: impl IntoIterator<Item = FixtureEntry>) -> Self {
        FixtureTransport {
            replies: entries.into_iter().map(|e| (e.bundle_hash, e.raw_reply)).collect(),
        }
    }

    /// Reads a JSON array of entries, or a single entry.
    pub fn load(path: &Path) -> Result<Self, AgentError> {
        let text = std::fs::read_to_string(path).map_err(|e| AgentError::Fixture(format!("{}: {e}", path.display())))?;
        let entries: Vec<FixtureEntry> = match serde_json::from_str::<Vec<FixtureEntry>>(&text) {
            Ok(v) => v,
            Err(_) => vec![serde_json::from_str(&text).map_err(|e| AgentError::Fixture(e.to_string()))?],
        };
        Ok(FixtureTransport::new(entries))
    }
}

impl Transport for FixtureTransport {
    fn complete(&self, _endpoint: &AgentEndpoint, bundle: &PromptBundle) -> Result<String, AgentError> {
        let h = bundle.bundle_hash();
        self.replies.get(&h).cloned().ok_or(AgentError::MissingFixture(h))
    }
}
