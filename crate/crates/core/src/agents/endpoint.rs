use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::AgentError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provider {
    #[serde(rename = "openai")]
    OpenAi,
    Anthropic,
}

impl fmt::Display for Provider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provider::OpenAi => "openai",
            Provider::Anthropic => "anthropic",
        })
    }
}

impl FromStr for Provider {
    type Err = AgentError;

    fn from_str(s: &str) -> Result<Self, AgentError> {
        match s.to_ascii_lowercase().as_str() {
            "openai" => Ok(Provider::OpenAi),
            "anthropic" => Ok(Provider::Anthropic),
            other => Err(AgentError::InvalidEndpoint(format!("unknown provider {other:?}"))),
        }
    }
}

/// Where and how to reach a chat-completion model.
///
/// Only the *name* of the credential variable is stored; the secret itself is
/// read from the environment at request time and never serialized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgentEndpoint {
    pub provider: Provider,
    pub model: String,
    pub base_url: String,
    pub credential_env: String,
    pub timeout_ms: u64,
    pub max_retries: u32,
    /// Upper bound on reply tokens, also used to size prompts (about 4 characters per token).
    pub token_budget: u32,
    /// First retry delay; doubles on each further attempt.
    pub backoff_ms: u64,
}

impl Default for AgentEndpoint {
    fn default() -> Self {
        AgentEndpoint::for_provider(Provider::OpenAi, "gpt-4o-mini")
    }
}

impl AgentEndpoint {
    pub fn for_provider(provider: Provider, model: impl Into<String>) -> Self {
        let (base_url, credential_env) = match provider {
            Provider::OpenAi => ("https://api.openai.com/v1", "OPENAI_API_KEY"),
            Provider::Anthropic => ("https://api.anthropic.com", "ANTHROPIC_API_KEY"),
        };
        AgentEndpoint {
            provider,
            model: model.into(),
            base_url: base_url.to_string(),
            credential_env: credential_env.to_string(),
            timeout_ms: 60_000,
            max_retries: 3,
            token_budget: 4_096,
            backoff_ms: 500,
        }
    }

    pub fn validate(&self) -> Result<(), AgentError> {
        if self.timeout_ms == 0 {
            return Err(AgentError::InvalidEndpoint("timeout must be positive".into()));
        }
        if self.model.trim().is_empty() {
            return Err(AgentError::InvalidEndpoint("model is empty".into()));
        }
        if self.token_budget == 0 {
            return Err(AgentError::InvalidEndpoint("token budget must be positive".into()));
        }
        Ok(())
    }

    /// Prompt size limit derived from the token budget.
    pub fn char_budget(&self) -> usize {
        self.token_budget as usize * 4
    }

    pub fn credential(&self) -> Result<String, AgentError> {
        std::env::var(&self.credential_env)
            .ok()
            .filter(|v| !v.is_empty())
            .ok_or_else(|| AgentError::MissingCredential(self.credential_env.clone()))
    }
}
