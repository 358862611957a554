use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::board::{reverse_row, Board, MAX_EXPONENT};
use super::EngineError;

/// Move direction. The derived order (Up < Down < Left < Right) is the tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MoveDir {
    Up,
    Down,
    Left,
    Right,
}

impl MoveDir {
    pub const ALL: [MoveDir; 4] = [MoveDir::Up, MoveDir::Down, MoveDir::Left, MoveDir::Right];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            MoveDir::Up => "UP",
            MoveDir::Down => "DOWN",
            MoveDir::Left => "LEFT",
            MoveDir::Right => "RIGHT",
        }
    }

    pub fn letter(self) -> char {
        match self {
            MoveDir::Up => 'U',
            MoveDir::Down => 'D',
            MoveDir::Left => 'L',
            MoveDir::Right => 'R',
        }
    }
}

impl fmt::Display for MoveDir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MoveDir {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "up" | "u" => Ok(MoveDir::Up),
            "down" | "d" => Ok(MoveDir::Down),
            "left" | "l" => Ok(MoveDir::Left),
            "right" | "r" => Ok(MoveDir::Right),
            _ => Err(EngineError::UnknownDirection(s.to_string())),
        }
    }
}

/// Result of sliding a board.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slide {
    pub board: Board,
    pub score_delta: u32,
    pub moved: bool,
}

struct Tables {
    left: Vec<u16>,
    right: Vec<u16>,
    score: Vec<u32>,
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut left = vec![0u16; 1 << 16];
        let mut right = vec![0u16; 1 << 16];
        let mut score = vec![0u32; 1 << 16];
        for row in 0..=u16::MAX {
            let (slid, gained) = slide_row_left(row);
            left[row as usize] = slid;
            score[row as usize] = gained;
            right[reverse_row(row) as usize] = reverse_row(slid);
        }
        Tables { left, right, score }
    })
}

/// Slides one packed row toward column 0. Cell `c` is nibble `c`.
fn slide_row_left(row: u16) -> (u16, u32) {
    let cells = [row & 0xF, (row >> 4) & 0xF, (row >> 8) & 0xF, (row >> 12) & 0xF];
    let mut out = [0u16; 4];
    let mut len = 0;
    let mut gained = 0u32;
    // A slot that was produced by a merge may not merge again in the same move.
    let mut last_merged = false;
    for &e in cells.iter().filter(|&&e| e != 0) {
        if len > 0 && !last_merged && out[len - 1] == e && e < u16::from(MAX_EXPONENT) {
            out[len - 1] = e + 1;
            gained += 1u32 << (e + 1);
            last_merged = true;
        } else {
            out[len] = e;
            len += 1;
            last_merged = false;
        }
    }
    (out[0] | (out[1] << 4) | (out[2] << 8) | (out[3] << 12), gained)
}

fn slide_rows(board: Board, table: &[u16], score_table: &[u32], score_index: impl Fn(u16) -> u16) -> (u64, u32) {
    let mut out = 0u64;
    let mut gained = 0u32;
    for r in 0..4 {
        let row = board.row_bits(r);
        out |= u64::from(table[row as usize]) << (16 * r);
        gained += score_table[score_index(row) as usize];
    }
    (out, gained)
}

/// Applies one move without spawning. Total function.
pub fn slide(board: Board, dir: MoveDir) -> Slide {
    let t = tables();
    let (raw, score_delta) = match dir {
        MoveDir::Left => slide_rows(board, &t.left, &t.score, |r| r),
        MoveDir::Right => slide_rows(board, &t.right, &t.score, reverse_row),
        MoveDir::Up => {
            let (raw, s) = slide_rows(board.transpose(), &t.left, &t.score, |r| r);
            (Board::from_raw(raw).transpose().raw(), s)
        }
        MoveDir::Down => {
            let (raw, s) = slide_rows(board.transpose(), &t.right, &t.score, reverse_row);
            (Board::from_raw(raw).transpose().raw(), s)
        }
    };
    let next = Board::from_raw(raw);
    Slide {
        board: next,
        score_delta,
        moved: next != board,
    }
}

/// Directions that change the board, in `MoveDir` order.
pub fn legal_moves(board: Board) -> Vec<MoveDir> {
    MoveDir::ALL
        .into_iter()
        .filter(|&d| slide(board, d).moved)
        .collect()
}

pub fn is_terminal(board: Board) -> bool {
    MoveDir::ALL.into_iter().all(|d| !slide(board, d).moved)
}
