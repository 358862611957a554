//! Chat-completion agents: endpoint configuration, deterministic prompt
//! rendering, total reply parsing, HTTP/mock/fixture transports, and the
//! executor and thinker roles used by the training loops.

mod client;
mod endpoint;
mod mock;
mod parse;
mod prompt;
mod transport;

pub use client::{AgentClient, LlmExecutor, LlmThinker};
pub use endpoint::{AgentEndpoint, Provider};
pub use mock::{EchoThinker, FirstLegalExecutor, PreferenceExecutor};
pub use parse::{parse_reply, Payload, PayloadKind};
pub use prompt::{
    build_move_prompt, build_refine_prompt, parse_board_grid, render_board_grid, PromptBundle, PromptRole, RefineHistory,
    RefineTarget,
};
pub use transport::{FixtureEntry, FixtureTransport, HttpTransport, MockTransport, ScriptedTransport, Transport};

use crate::engine::{Board, MoveDir};
use crate::evolution::StrategyText;
use crate::heuristics::SpecError;
use crate::GameRecord;

/// A move chosen by an executor together with whatever reasoning it gave.
#[derive(Debug, Clone, PartialEq)]
pub struct MoveDecision {
    pub dir: MoveDir,
    pub reasoning: String,
}

/// Chooses moves during play, optionally guided by a written strategy.
pub trait MoveAgent: Send + Sync {
    fn choose_move(&self, board: Board, strategy: Option<&StrategyText>) -> Result<MoveDecision, AgentError>;
}

/// Writes the next strategy after seeing a round of games and the executor's reasoning.
pub trait StrategyAgent: Send + Sync {
    fn refine(&self, current: &StrategyText, games: &[GameRecord], reasoning: &[String]) -> Result<String, AgentError>;
}

/// Raw reply plus the parsed payload, if one was found.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentReply {
    pub raw: String,
    pub payload: Option<Payload>,
    pub parse_ok: bool,
    pub parse_error: Option<String>,
}

impl AgentReply {
    pub fn from_raw(raw: String, kind: PayloadKind) -> Self {
        match parse_reply(&raw, kind) {
            Ok(p) => AgentReply {
                raw,
                payload: Some(p),
                parse_ok: true,
                parse_error: None,
            },
            Err(e) => AgentReply {
                raw,
                payload: None,
                parse_ok: false,
                parse_error: Some(e.to_string()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("no move keyword found")]
    NoMove,
    #[error("reply is empty")]
    Empty,
    #[error("no fenced block found")]
    NoFencedBlock,
    #[error("no fenced block holds a weight listing")]
    NoWeightListing,
    #[error("no fenced block defines evaluate(board)")]
    NoProgram,
    #[error("weight listing is invalid: {0}")]
    InvalidSpec(#[from] SpecError),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AgentError {
    #[error("network failure: {0}")]
    Network(String),
    #[error("rate limited: {0}")]
    RateLimited(String),
    #[error("request timed out: {0}")]
    Timeout(String),
    #[error("http status {status}: {body}")]
    Http { status: u16, body: String },
    #[error("credential variable {0} is not set")]
    MissingCredential(String),
    #[error("unexpected provider response: {0}")]
    Protocol(String),
    #[error("prompt needs {len} characters but the budget is {cap}")]
    Budget { len: usize, cap: usize },
    #[error("refinement needs at least one completed game")]
    EmptyHistory,
    #[error("no usable move after {attempts} attempts: {last}")]
    NoUsableMove { attempts: u32, last: String },
    #[error("reply could not be parsed: {0}")]
    Parse(#[from] ParseError),
    #[error("no recorded fixture for bundle {0}")]
    MissingFixture(String),
    #[error("fixture file: {0}")]
    Fixture(String),
    #[error("invalid endpoint: {0}")]
    InvalidEndpoint(String),
}

impl AgentError {
    /// Transient failures worth retrying with backoff.
    pub fn is_retryable(&self) -> bool {
        match self {
            AgentError::Network(_) | AgentError::RateLimited(_) | AgentError::Timeout(_) => true,
            AgentError::Http { status, .. } => *status >= 500,
            _ => false,
        }
    }
}
