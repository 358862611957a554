use std::sync::Arc;
use std::time::Duration;

use super::{
    build_move_prompt, build_refine_prompt, AgentEndpoint, AgentError, AgentReply, MoveAgent, MoveDecision, Payload,
    PayloadKind, PromptBundle, PromptRole, RefineHistory, RefineTarget, StrategyAgent, Transport,
};
use crate::engine::{legal_moves, Board};
use crate::evolution::StrategyText;
use crate::GameRecord;

/// An endpoint plus the transport used to reach it.
#[derive(Clone)]
pub struct AgentClient {
    pub endpoint: AgentEndpoint,
    transport: Arc<dyn Transport>,
}

impl AgentClient {
    pub fn new(endpoint: AgentEndpoint, transport: Arc<dyn Transport>) -> Result<Self, AgentError> {
        endpoint.validate()?;
        Ok(AgentClient { endpoint, transport })
    }

    /// Sends `bundle`, retrying transient failures with exponential backoff.
    ///
    /// A reply that does not parse is still returned, with `parse_ok = false`.
    pub fn request(&self, bundle: &PromptBundle, kind: PayloadKind) -> Result<AgentReply, AgentError> {
        let mut attempt = 0u32;
        loop {
            match self.transport.complete(&self.endpoint, bundle) {
                Ok(raw) => return Ok(AgentReply::from_raw(raw, kind)),
                Err(e) if e.is_retryable() && attempt < self.endpoint.max_retries => {
                    let delay = self.endpoint.backoff_ms.saturating_mul(1 << attempt.min(16));
                    log::warn!("agent request failed ({e}); retry {} in {delay} ms", attempt + 1);
                    std::thread::sleep(Duration::from_millis(delay));
                    attempt += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }
}

/// Executor backed by a chat model. Replies without a legal move are re-asked
/// up to `max_retries` more times.
pub struct LlmExecutor {
    pub client: AgentClient,
    pub role: PromptRole,
    pub strategy_cap: usize,
}

impl MoveAgent for LlmExecutor {
    fn choose_move(&self, board: Board, strategy: Option<&StrategyText>) -> Result<MoveDecision, AgentError> {
        let bundle = build_move_prompt(board, strategy, self.role, self.strategy_cap)?;
        let legal = legal_moves(board);
        let attempts = self.client.endpoint.max_retries + 1;
        let mut last = String::new();
        for _ in 0..attempts {
            let reply = self.client.request(&bundle, PayloadKind::Move)?;
            match reply.payload {
                Some(Payload::Move(dir)) if legal.contains(&dir) => {
                    return Ok(MoveDecision {
                        dir,
                        reasoning: reply.raw,
                    })
                }
                Some(Payload::Move(dir)) => last = format!("illegal move {dir}"),
                _ => last = reply.parse_error.unwrap_or_default(),
            }
        }
        Err(AgentError::NoUsableMove { attempts, last })
    }
}

/// Thinker backed by a chat model. Over-long strategies are cut to the cap.
pub struct LlmThinker {
    pub client: AgentClient,
    pub strategy_cap: usize,
}

impl StrategyAgent for LlmThinker {
    fn refine(&self, current: &StrategyText, games: &[GameRecord], reasoning: &[String]) -> Result<String, AgentError> {
        let history = RefineHistory {
            reports: &[],
            games,
            notes: reasoning,
        };
        let bundle = build_refine_prompt(history, RefineTarget::Strategy(current), self.client.endpoint.char_budget())?;
        let reply = self.client.request(&bundle, PayloadKind::Strategy)?;
        match reply.payload {
            Some(Payload::Strategy(text)) => Ok(text.chars().take(self.strategy_cap).collect()),
            _ => Err(AgentError::Parse(super::ParseError::Empty)),
        }
    }
}
