use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::AgentError;
use crate::engine::{legal_moves, Board};
use crate::evolution::{CycleReport, StrategyText};
use crate::heuristics::ValueFunctionSpec;
use crate::GameRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptRole {
    ExecutorMove,
    ThinkerRefine,
    ValueFunctionRefine,
    BaselineMove,
}

impl fmt::Display for PromptRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PromptRole::ExecutorMove => "executor_move",
            PromptRole::ThinkerRefine => "thinker_refine",
            PromptRole::ValueFunctionRefine => "value_function_refine",
            PromptRole::BaselineMove => "baseline_move",
        })
    }
}

/// A rendered prompt plus machine-readable copies of what it was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub role: PromptRole,
    pub text: String,
    pub attachments: BTreeMap<String, String>,
}

impl PromptBundle {
    /// Hex SHA-256 of role and text; the key for recorded reply fixtures.
    pub fn bundle_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.role.to_string().as_bytes());
        h.update(b"\n");
        h.update(self.text.as_bytes());
        hex::encode(h.finalize())
    }
}

const GRID_HEADER: &str = "Board (tile values, . = empty):";

/// Four right-aligned rows of tile values, `.` for empty cells.
pub fn render_board_grid(board: Board) -> String {
    let mut out = String::new();
    for row in board.values() {
        let cells: Vec<String> = row
            .iter()
            .map(|&v| if v == 0 { ".".to_string() } else { v.to_string() })
            .map(|s| format!("{s:>6}"))
            .collect();
        out.push_str(&cells.concat());
        out.push('\n');
    }
    out
}

/// Recovers the board from a rendered prompt (the grid following the board header).
pub fn parse_board_grid(text: &str) -> Option<Board> {
    let mut lines = text.lines().skip_while(|l| l.trim() != GRID_HEADER).skip(1);
    let mut values = [[0u32; 4]; 4];
    for row in values.iter_mut() {
        let tokens: Vec<&str> = lines.next()?.split_whitespace().collect();
        if tokens.len() != 4 {
            return None;
        }
        for (cell, tok) in row.iter_mut().zip(tokens) {
            *cell = if tok == "." { 0 } else { tok.parse().ok()? };
        }
    }
    Board::from_values(values).ok()
}

fn board_attachment(board: Board) -> String {
    board.exponents().iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")
}

/// Prompt asking for one move on `board`, optionally following a strategy.
///
/// Fails when the strategy is longer than `strategy_cap` characters.
pub fn build_move_prompt(
    board: Board,
    strategy: Option<&StrategyText>,
    role: PromptRole,
    strategy_cap: usize,
) -> Result<PromptBundle, AgentError> {
    let mut text = String::new();
    text.push_str("You are playing 2048 on a 4x4 board. Sliding merges equal tiles; a new 2 or 4 appears after every move.\n\n");
    text.push_str(GRID_HEADER);
    text.push('\n');
    text.push_str(&render_board_grid(board));
    let legal: Vec<&str> = legal_moves(board).iter().map(|d| d.name()).collect();
    let _ = writeln!(text, "\nLegal moves: {}", legal.join(", "));
    let mut attachments = BTreeMap::new();
    attachments.insert("board".to_string(), board_attachment(board));
    if let Some(s) = strategy {
        let len = s.text.chars().count();
        if len > strategy_cap {
            return Err(AgentError::Budget { len, cap: strategy_cap });
        }
        let _ = write!(text, "\nStrategy (round {}):\n{}\n", s.round_index, s.text);
        attachments.insert("strategy".to_string(), s.text.clone());
    }
    text.push_str("\nExplain briefly, then end with a line of the form FINAL: <UP|DOWN|LEFT|RIGHT>.\n");
    Ok(PromptBundle { role, text, attachments })
}

/// Games and reports a refinement prompt summarizes, oldest first.
#[derive(Debug, Clone, Copy, Default)]
pub struct RefineHistory<'a> {
    pub reports: &'a [CycleReport],
    pub games: &'a [GameRecord],
    /// Free-form notes per game (e.g. executor reasoning), aligned with `games`.
    pub notes: &'a [String],
}

/// The artifact being refined, included verbatim.
#[derive(Debug, Clone, Copy)]
pub enum RefineTarget<'a> {
    Spec(&'a ValueFunctionSpec),
    Strategy(&'a StrategyText),
}

/// Prompt asking for a revised value function or strategy.
///
/// Cycle and per-game summary lines are always included. Move traces and notes
/// are optional: they are added newest game first, each whole or not at all,
/// and the first one that does not fit ends the section so older traces are
/// the ones dropped.
pub fn build_refine_prompt(
    history: RefineHistory<'_>,
    target: RefineTarget<'_>,
    char_budget: usize,
) -> Result<PromptBundle, AgentError> {
    if history.games.is_empty() {
        return Err(AgentError::EmptyHistory);
    }
    let mut attachments = BTreeMap::new();
    let (role, intro, current, closing) = match target {
        RefineTarget::Spec(spec) => {
            attachments.insert("spec".to_string(), spec.to_json());
            (
                PromptRole::ValueFunctionRefine,
                "You are refining a heuristic value function that guides a Monte Carlo playout search for 2048.",
                spec.to_json(),
                "Reply with a revised value function as a fenced block of `term weight` lines using only these terms: \
                 empty_ratio, highest_ratio, corner_bonus, corner_proximity, bottom_row_ratio, merge_value_ratio, \
                 merge_ratio, monotonicity_score, snake_ratio, smoothness_ratio. Alternatively reply with a fenced \
                 Python block defining evaluate(board), where board is a 4x4 list of tile values.",
            )
        }
        RefineTarget::Strategy(s) => {
            attachments.insert("strategy".to_string(), s.text.clone());
            (
                PromptRole::ThinkerRefine,
                "You are writing the strategy another model follows while playing 2048.",
                s.text.clone(),
                "Reply with the complete revised strategy text only.",
            )
        }
    };
    let mut text = String::new();
    let _ = writeln!(text, "{intro}\n");
    if !history.reports.is_empty() {
        text.push_str("Cycle summaries:\n");
        for r in history.reports {
            let _ = writeln!(
                text,
                "cycle {}: spec {} mean {:.1} ci95 {:.1}{}",
                r.cycle_index,
                r.spec_id,
                r.mean_score,
                r.ci95_half_width,
                if r.failure.is_some() { " FAILED" } else { "" }
            );
        }
        text.push('\n');
    }
    text.push_str("Games:\n");
    for (i, g) in history.games.iter().enumerate() {
        let _ = writeln!(
            text,
            "game {}: seed {} score {} highest_tile {} moves {}",
            i + 1,
            g.seed,
            g.final_score,
            g.highest_tile,
            g.steps.len()
        );
    }
    let _ = writeln!(text, "\nCurrent:\n{current}\n");
    let _ = writeln!(text, "{closing}\n");

    let mut optional = String::new();
    let mut header_added = false;
    for (i, g) in history.games.iter().enumerate().rev() {
        let mut block = format!("trace {}: {}\n", i + 1, g.move_trace());
        if let Some(note) = history.notes.get(i).filter(|n| !n.is_empty()) {
            let _ = writeln!(block, "note {}: {}", i + 1, note.replace('\n', " "));
        }
        let header = if header_added { "" } else { "Move traces, most recent first:\n" };
        if text.len() + optional.len() + header.len() + block.len() > char_budget {
            break;
        }
        optional.push_str(header);
        optional.push_str(&block);
        header_added = true;
    }
    if text.len() > char_budget {
        return Err(AgentError::Budget {
            len: text.len(),
            cap: char_budget,
        });
    }
    text.push_str(&optional);
    Ok(PromptBundle { role, text, attachments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::StrategyAuthor;
    use crate::engine::play_game;
    use crate::MoveDir;
    use proptest::prelude::*;

    fn strategy(text: &str) -> StrategyText {
        StrategyText::new(1, text, StrategyAuthor::Seed, 4000).unwrap()
    }

    #[test]
    fn move_prompt_is_deterministic() {
        let b = Board::from_values([[2, 0, 0, 4], [0, 8, 0, 0], [0, 0, 0, 0], [1024, 0, 2, 2]]).unwrap();
        let a = build_move_prompt(b, None, PromptRole::ExecutorMove, 100).unwrap();
        let c = build_move_prompt(b, None, PromptRole::ExecutorMove, 100).unwrap();
        assert_eq!(a, c);
        assert_eq!(a.bundle_hash(), c.bundle_hash());
        assert!(a.text.contains("Legal moves: UP, DOWN, LEFT, RIGHT"));
    }

    #[test]
    fn long_strategy_is_rejected() {
        let s = strategy(&"x".repeat(50));
        let err = build_move_prompt(Board::EMPTY.with_cell(0, 1), Some(&s), PromptRole::ExecutorMove, 49).unwrap_err();
        assert_eq!(err, AgentError::Budget { len: 50, cap: 49 });
    }

    #[test]
    fn refine_prompt_needs_games() {
        let s = strategy("go");
        assert_eq!(
            build_refine_prompt(RefineHistory::default(), RefineTarget::Strategy(&s), 10_000),
            Err(AgentError::EmptyHistory)
        );
    }

    fn games(n: u64) -> Vec<GameRecord> {
        (0..n)
            .map(|s| {
                play_game(s, |b| {
                    *legal_moves(b).first().unwrap_or(&MoveDir::Up)
                })
            })
            .collect()
    }

    #[test]
    fn ten_games_give_ten_summary_lines() {
        let g = games(10);
        let s = strategy("keep the big tile in a corner");
        let hist = RefineHistory {
            games: &g,
            ..Default::default()
        };
        let p = build_refine_prompt(hist, RefineTarget::Strategy(&s), 1_000_000).unwrap();
        assert_eq!(p.text.lines().filter(|l| l.starts_with("game ")).count(), 10);
        assert_eq!(p.text.lines().filter(|l| l.starts_with("trace ")).count(), 10);
    }

    #[test]
    fn truncation_drops_oldest_traces() {
        let g = games(6);
        let s = strategy("corner");
        let hist = RefineHistory {
            games: &g,
            ..Default::default()
        };
        let full = build_refine_prompt(hist, RefineTarget::Strategy(&s), 1_000_000).unwrap();
        let budget = full.text.len() - g[0].move_trace().len() - 2;
        let cut = build_refine_prompt(hist, RefineTarget::Strategy(&s), budget).unwrap();
        assert!(cut.text.len() <= budget);
        let traces: Vec<&str> = cut.text.lines().filter(|l| l.starts_with("trace ")).collect();
        assert!(!traces.is_empty());
        assert!(traces[0].starts_with("trace 6:"));
        assert!(!cut.text.contains("trace 1:"));
        assert_eq!(cut.text.lines().filter(|l| l.starts_with("game ")).count(), 6);
    }

    proptest! {
        #[test]
        fn grid_render_parses_back(exps in proptest::array::uniform16(0u8..=15)) {
            let b = Board::from_exponents(exps).unwrap();
            let text = format!("{GRID_HEADER}\n{}", render_board_grid(b));
            prop_assert_eq!(parse_board_grid(&text), Some(b));
        }
    }
}
