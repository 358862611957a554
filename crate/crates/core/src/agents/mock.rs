use super::{AgentError, MoveAgent, MoveDecision, StrategyAgent};
use crate::engine::{legal_moves, Board, MoveDir};
use crate::evolution::StrategyText;
use crate::GameRecord;

fn first_legal(board: Board) -> Result<MoveDir, AgentError> {
    legal_moves(board).first().copied().ok_or(AgentError::NoUsableMove {
        attempts: 0,
        last: "board is terminal".into(),
    })
}

/// Always plays the first legal move in direction order.
#[derive(Debug, Default, Clone, Copy)]
pub struct FirstLegalExecutor;

impl MoveAgent for FirstLegalExecutor {
    fn choose_move(&self, board: Board, _strategy: Option<&StrategyText>) -> Result<MoveDecision, AgentError> {
        Ok(MoveDecision {
            dir: first_legal(board)?,
            reasoning: "first legal move".into(),
        })
    }
}

/// Follows a "prefer X then Y ..." sentence in the strategy, if there is one,
/// and otherwise behaves like [`FirstLegalExecutor`].
#[derive(Debug, Default, Clone, Copy)]
pub struct PreferenceExecutor;

impl PreferenceExecutor {
    pub fn preferences(text: &str) -> Vec<MoveDir> {
        let lower = text.to_ascii_lowercase();
        let Some(start) = lower.find("prefer ") else {
            return Vec::new();
        };
        let words: Vec<&str> = lower[start + 7..]
            .split(|c: char| !c.is_ascii_alphabetic())
            .filter(|w| !w.is_empty())
            .collect();
        let dir = |w: &str| if w.len() > 1 { w.parse::<MoveDir>().ok() } else { None };
        // "prefer A then B then C": stop at the first word that breaks the pattern.
        let mut out = Vec::new();
        let mut i = 0;
        while let Some(d) = words.get(i).and_then(|w| dir(w)) {
            if !out.contains(&d) {
                out.push(d);
            }
            if words.get(i + 1) != Some(&"then") {
                break;
            }
            i += 2;
        }
        out
    }
}

impl MoveAgent for PreferenceExecutor {
    fn choose_move(&self, board: Board, strategy: Option<&StrategyText>) -> Result<MoveDecision, AgentError> {
        let legal = legal_moves(board);
        let prefs = strategy.map(|s| Self::preferences(&s.text)).unwrap_or_default();
        if let Some(&d) = prefs.iter().find(|d| legal.contains(d)) {
            return Ok(MoveDecision {
                dir: d,
                reasoning: format!("preferred {d}"),
            });
        }
        Ok(MoveDecision {
            dir: first_legal(board)?,
            reasoning: "no preference applies; first legal move".into(),
        })
    }
}

/// Returns the current strategy unchanged.
#[derive(Debug, Default, Clone, Copy)]
pub struct EchoThinker;

impl StrategyAgent for EchoThinker {
    fn refine(&self, current: &StrategyText, _games: &[GameRecord], _reasoning: &[String]) -> Result<String, AgentError> {
        Ok(current.text.clone())
    }
}
