//! 2048 mechanics: packed boards, table-driven slides, seeded spawning and
//! replayable game records.

mod board;
mod game;
mod slide;

pub use board::{Board, MAX_EXPONENT};
pub use game::{
    play_game, read_jsonl, replay, spawn, try_play_game, write_jsonl, Divergence, GameRecord, PlayError,
    SpawnEvent, Step, FOUR_PROBABILITY,
};
pub use slide::{is_terminal, legal_moves, slide, MoveDir, Slide};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("cell {cell} has exponent {exponent}, above the packed maximum")]
    ExponentOutOfRange { cell: usize, exponent: u8 },
    #[error("{0} is not a valid tile value")]
    InvalidTileValue(u32),
    #[error("cannot spawn on a full board")]
    BoardFull,
    #[error("unknown direction {0:?}")]
    UnknownDirection(String),
    #[error("line {line}: corrupt game record: {message}")]
    CorruptRecord { line: usize, message: String },
    #[error("io: {0}")]
    Io(String),
}
