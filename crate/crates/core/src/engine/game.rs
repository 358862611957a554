use std::io::{BufRead, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::board::Board;
use super::slide::{is_terminal, slide, MoveDir};
use super::EngineError;
use crate::rng::{stream_rng, StreamRng};

/// Probability that a spawned tile is a 4.
pub const FOUR_PROBABILITY: f64 = 0.1;

/// A tile placed by the environment after a move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpawnEvent {
    pub cell: u8,
    /// 1 for a 2-tile, 2 for a 4-tile.
    pub exponent: u8,
}

/// Places one tile on a uniformly chosen empty cell: a 2 with probability 0.9,
/// otherwise a 4. The cell is drawn first, then the value.
pub fn spawn(board: Board, rng: &mut StreamRng) -> Result<(Board, SpawnEvent), EngineError> {
    let empty = board.empty_count();
    if empty == 0 {
        return Err(EngineError::BoardFull);
    }
    let k = rng.random_range(0..empty) as usize;
    let cell = board.empty_cells().nth(k).expect("k < empty count");
    let exponent = if rng.random_bool(FOUR_PROBABILITY) { 2 } else { 1 };
    let event = SpawnEvent {
        cell: cell as u8,
        exponent,
    };
    Ok((board.with_cell(cell, exponent), event))
}

/// One move of a recorded game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub dir: MoveDir,
    pub spawn_cell: u8,
    pub spawn_exp: u8,
    pub score_delta: u32,
}

impl Step {
    pub fn spawn(&self) -> SpawnEvent {
        SpawnEvent {
            cell: self.spawn_cell,
            exponent: self.spawn_exp,
        }
    }
}

/// Seeded, replayable trace of one game. Serialized as a single JSON line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameRecord {
    pub seed: u64,
    pub initial_board: Board,
    pub steps: Vec<Step>,
    pub final_score: u64,
    pub highest_tile: u32,
    pub terminal: bool,
}

impl GameRecord {
    /// Board after the last step, recomputed from the trace.
    pub fn final_board(&self) -> Board {
        self.steps.iter().fold(self.initial_board, |b, s| {
            slide(b, s.dir).board.with_cell(s.spawn_cell as usize, s.spawn_exp)
        })
    }

    /// Moves as a compact `UDLR` string.
    pub fn move_trace(&self) -> String {
        self.steps.iter().map(|s| s.dir.letter()).collect()
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("game record serializes")
    }

    pub fn from_json_line(line: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(line)
    }
}

/// Why a game stopped abnormally. Carries the record up to the failure.
#[derive(Debug, thiserror::Error)]
pub enum PlayError<E> {
    #[error("policy chose illegal move {dir} on board {board:?}")]
    IllegalMove {
        board: Board,
        dir: MoveDir,
        partial: Box<GameRecord>,
    },
    #[error("policy failed: {source}")]
    Policy { source: E, partial: Box<GameRecord> },
}

impl<E> PlayError<E> {
    pub fn partial(&self) -> &GameRecord {
        match self {
            PlayError::IllegalMove { partial, .. } | PlayError::Policy { partial, .. } => partial,
        }
    }
}

fn initial_position(rng: &mut StreamRng) -> Board {
    let (b, _) = spawn(Board::EMPTY, rng).expect("empty board has room");
    let (b, _) = spawn(b, rng).expect("board has room");
    b
}

/// Plays one game to the end with a fallible policy.
///
/// The seed drives only tile spawns (two initial tiles, then one after every
/// move), so a record can be replayed from `seed` and its move list alone.
pub fn try_play_game<E, P>(seed: u64, mut policy: P) -> Result<GameRecord, PlayError<E>>
where
    P: FnMut(Board) -> Result<MoveDir, E>,
{
    let mut rng = stream_rng(seed);
    let initial_board = initial_position(&mut rng);
    let mut record = GameRecord {
        seed,
        initial_board,
        steps: Vec::new(),
        final_score: 0,
        highest_tile: initial_board.highest_tile(),
        terminal: false,
    };
    let mut board = initial_board;
    while !is_terminal(board) {
        let dir = match policy(board) {
            Ok(d) => d,
            Err(source) => {
                return Err(PlayError::Policy {
                    source,
                    partial: Box::new(record),
                })
            }
        };
        let s = slide(board, dir);
        if !s.moved {
            return Err(PlayError::IllegalMove {
                board,
                dir,
                partial: Box::new(record),
            });
        }
        let (next, ev) = spawn(s.board, &mut rng).expect("a moved board has an empty cell");
        record.steps.push(Step {
            dir,
            spawn_cell: ev.cell,
            spawn_exp: ev.exponent,
            score_delta: s.score_delta,
        });
        record.final_score += u64::from(s.score_delta);
        record.highest_tile = next.highest_tile();
        board = next;
    }
    record.terminal = true;
    Ok(record)
}

/// Plays one game with an infallible policy. Panics if the policy returns an illegal move.
pub fn play_game<P>(seed: u64, mut policy: P) -> GameRecord
where
    P: FnMut(Board) -> MoveDir,
{
    match try_play_game::<std::convert::Infallible, _>(seed, |b| Ok(policy(b))) {
        Ok(r) => r,
        Err(PlayError::IllegalMove { board, dir, .. }) => {
            panic!("policy returned illegal move {dir} on board\n{board}")
        }
        Err(PlayError::Policy { source, .. }) => match source {},
    }
}

/// Where a replay diverged from its record.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Divergence {
    #[error("initial board differs: recorded {recorded:?}, replayed {replayed:?}")]
    InitialBoard { recorded: Board, replayed: Board },
    #[error("step {step}: move {dir} is illegal on the replayed board")]
    IllegalMove { step: usize, dir: MoveDir },
    #[error("step {step}: score_delta recorded {recorded}, replayed {replayed}")]
    ScoreDelta { step: usize, recorded: u32, replayed: u32 },
    #[error("step {step}: spawn recorded {recorded:?}, replayed {replayed:?}")]
    Spawn {
        step: usize,
        recorded: SpawnEvent,
        replayed: SpawnEvent,
    },
    #[error("final score recorded {recorded}, replayed {replayed}")]
    FinalScore { recorded: u64, replayed: u64 },
    #[error("highest tile recorded {recorded}, replayed {replayed}")]
    HighestTile { recorded: u32, replayed: u32 },
    #[error("terminal flag recorded {recorded}, replayed {replayed}")]
    Terminal { recorded: bool, replayed: bool },
}

/// Re-simulates a record from its seed and moves, checking every stored field.
/// Returns the sequence of boards (initial board first).
pub fn replay(record: &GameRecord) -> Result<Vec<Board>, Divergence> {
    let mut rng = stream_rng(record.seed);
    let mut board = initial_position(&mut rng);
    if board != record.initial_board {
        return Err(Divergence::InitialBoard {
            recorded: record.initial_board,
            replayed: board,
        });
    }
    let mut boards = vec![board];
    let mut score = 0u64;
    for (i, step) in record.steps.iter().enumerate() {
        let s = slide(board, step.dir);
        if !s.moved {
            return Err(Divergence::IllegalMove { step: i, dir: step.dir });
        }
        if s.score_delta != step.score_delta {
            return Err(Divergence::ScoreDelta {
                step: i,
                recorded: step.score_delta,
                replayed: s.score_delta,
            });
        }
        let (next, ev) = spawn(s.board, &mut rng).expect("a moved board has an empty cell");
        if ev != step.spawn() {
            return Err(Divergence::Spawn {
                step: i,
                recorded: step.spawn(),
                replayed: ev,
            });
        }
        score += u64::from(s.score_delta);
        board = next;
        boards.push(board);
    }
    if score != record.final_score {
        return Err(Divergence::FinalScore {
            recorded: record.final_score,
            replayed: score,
        });
    }
    if board.highest_tile() != record.highest_tile {
        return Err(Divergence::HighestTile {
            recorded: record.highest_tile,
            replayed: board.highest_tile(),
        });
    }
    if is_terminal(board) != record.terminal {
        return Err(Divergence::Terminal {
            recorded: record.terminal,
            replayed: is_terminal(board),
        });
    }
    Ok(boards)
}

pub fn write_jsonl<W: Write>(mut out: W, records: &[GameRecord]) -> std::io::Result<()> {
    for r in records {
        writeln!(out, "{}", r.to_json_line())?;
    }
    Ok(())
}

/// Reads records, one per non-blank line. Errors name the 1-based line.
pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<GameRecord>, EngineError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| EngineError::Io(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = GameRecord::from_json_line(&line).map_err(|e| EngineError::CorruptRecord {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}
