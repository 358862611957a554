use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SpecError;
use crate::engine::Board;

/// The closed vocabulary of heuristic terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermKind {
    EmptyRatio,
    HighestRatio,
    CornerBonus,
    CornerProximity,
    BottomRowRatio,
    MergeValueRatio,
    MergeRatio,
    MonotonicityScore,
    SnakeRatio,
    SmoothnessRatio,
}

impl TermKind {
    pub const ALL: [TermKind; 10] = [
        TermKind::EmptyRatio,
        TermKind::HighestRatio,
        TermKind::CornerBonus,
        TermKind::CornerProximity,
        TermKind::BottomRowRatio,
        TermKind::MergeValueRatio,
        TermKind::MergeRatio,
        TermKind::MonotonicityScore,
        TermKind::SnakeRatio,
        TermKind::SmoothnessRatio,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TermKind::EmptyRatio => "empty_ratio",
            TermKind::HighestRatio => "highest_ratio",
            TermKind::CornerBonus => "corner_bonus",
            TermKind::CornerProximity => "corner_proximity",
            TermKind::BottomRowRatio => "bottom_row_ratio",
            TermKind::MergeValueRatio => "merge_value_ratio",
            TermKind::MergeRatio => "merge_ratio",
            TermKind::MonotonicityScore => "monotonicity_score",
            TermKind::SnakeRatio => "snake_ratio",
            TermKind::SmoothnessRatio => "smoothness_ratio",
        }
    }

    /// Parameter names the term accepts, with defaults.
    pub fn param_defaults(self) -> &'static [(&'static str, f64)] {
        match self {
            TermKind::CornerProximity => &[("br_weight", 0.7)],
            TermKind::HighestRatio => &[("target_exponent", 11.0)],
            _ => &[],
        }
    }
}

impl fmt::Display for TermKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TermKind {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TermKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| SpecError::UnknownTerm(s.to_string()))
    }
}

/// A term plus its optional scalar parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeuristicTerm {
    pub kind: TermKind,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

impl HeuristicTerm {
    pub fn new(kind: TermKind) -> Self {
        HeuristicTerm {
            kind,
            params: BTreeMap::new(),
        }
    }

    pub fn param(&self, name: &str) -> f64 {
        self.params.get(name).copied().unwrap_or_else(|| {
            self.kind
                .param_defaults()
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, v)| *v)
                .expect("parameter declared for term")
        })
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        for (name, value) in &self.params {
            if !self.kind.param_defaults().iter().any(|(n, _)| n == name) {
                return Err(SpecError::UnknownParam {
                    term: self.kind.name().to_string(),
                    param: name.clone(),
                });
            }
            let ok = match (self.kind, name.as_str()) {
                (TermKind::CornerProximity, "br_weight") => (0.0..=1.0).contains(value),
                (TermKind::HighestRatio, "target_exponent") => value.is_finite() && *value >= 1.0,
                _ => value.is_finite(),
            };
            if !ok {
                return Err(SpecError::InvalidParam {
                    term: self.kind.name().to_string(),
                    param: name.clone(),
                    value: *value,
                });
            }
        }
        Ok(())
    }
}

/// Precomputed per-board quantities shared by several terms.
struct Cells {
    exp: [u8; 16],
    total: f64,
}

impl Cells {
    fn new(board: Board) -> Self {
        let exp = board.exponents();
        let total = exp.iter().map(|&e| value(e)).sum();
        Cells { exp, total }
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> u8 {
        self.exp[4 * r + c]
    }

    /// First cell (row-major) holding the largest exponent; `None` on an empty board.
    fn highest_pos(&self) -> Option<(usize, usize)> {
        let max = *self.exp.iter().max()?;
        if max == 0 {
            return None;
        }
        let i = self.exp.iter().position(|&e| e == max)?;
        Some((i / 4, i % 4))
    }

    /// Horizontally and vertically adjacent cell pairs, both nonzero.
    fn occupied_pairs(&self) -> impl Iterator<Item = (u8, u8)> + '_ {
        (0..4)
            .flat_map(|r| (0..3).map(move |c| ((r, c), (r, c + 1))))
            .chain((0..3).flat_map(|r| (0..4).map(move |c| ((r, c), (r + 1, c)))))
            .map(|((r1, c1), (r2, c2))| (self.at(r1, c1), self.at(r2, c2)))
            .filter(|&(a, b)| a != 0 && b != 0)
    }
}

#[inline]
fn value(e: u8) -> f64 {
    if e == 0 {
        0.0
    } else {
        f64::from(1u32 << e)
    }
}

/// Number of horizontally/vertically adjacent pairs on a 4x4 board.
pub const ADJACENT_PAIRS: f64 = 24.0;

/// The zigzag path anchored at the bottom-right corner: bottom row right to
/// left, third row left to right, second row right to left, top row left to right.
pub const SNAKE_PATH: [(usize, usize); 16] = [
    (3, 3),
    (3, 2),
    (3, 1),
    (3, 0),
    (2, 0),
    (2, 1),
    (2, 2),
    (2, 3),
    (1, 3),
    (1, 2),
    (1, 1),
    (1, 0),
    (0, 0),
    (0, 1),
    (0, 2),
    (0, 3),
];

const CORNERS_OTHER_THAN_BR: [(usize, usize); 3] = [(0, 0), (0, 3), (3, 0)];

fn proximity(pos: (usize, usize), corner: (usize, usize)) -> f64 {
    let d = pos.0.abs_diff(corner.0) + pos.1.abs_diff(corner.1);
    1.0 - d as f64 / 6.0
}

/// Nonzero-aware monotonicity: adjacent pairs with an empty cell are skipped,
/// and a line without tiles is not credited.
fn line_monotone(line: [u8; 4], allow_decreasing: bool, allow_increasing: bool) -> bool {
    if line.iter().all(|&e| e == 0) {
        return false;
    }
    let pairs = line.windows(2).filter(|w| w[0] != 0 && w[1] != 0);
    let (mut dec, mut inc) = (true, true);
    for w in pairs {
        dec &= w[0] >= w[1];
        inc &= w[0] <= w[1];
    }
    (allow_decreasing && dec) || (allow_increasing && inc)
}

/// Evaluates one term. Every built-in term lands in `[0, 1]`.
pub fn eval_term(term: &HeuristicTerm, board: Board) -> f64 {
    let cells = Cells::new(board);
    eval_kind(term, &cells)
}

fn eval_kind(term: &HeuristicTerm, cells: &Cells) -> f64 {
    match term.kind {
        TermKind::EmptyRatio => cells.exp.iter().filter(|&&e| e == 0).count() as f64 / 16.0,
        TermKind::HighestRatio => {
            let max = *cells.exp.iter().max().unwrap_or(&0);
            (f64::from(max) / term.param("target_exponent")).clamp(0.0, 1.0)
        }
        TermKind::CornerBonus => match cells.highest_pos() {
            Some((3, 0)) | Some((3, 3)) => 1.0,
            Some((0, 0)) | Some((0, 3)) => 0.5,
            Some((3, 1)) | Some((3, 2)) => 0.25,
            _ => 0.0,
        },
        TermKind::CornerProximity => match cells.highest_pos() {
            None => 0.0,
            Some(pos) => {
                let br = proximity(pos, (3, 3));
                let other = CORNERS_OTHER_THAN_BR
                    .iter()
                    .map(|&c| proximity(pos, c))
                    .fold(f64::NEG_INFINITY, f64::max);
                let w = term.param("br_weight");
                w * br + (1.0 - w) * other
            }
        },
        TermKind::BottomRowRatio => {
            if cells.total == 0.0 {
                0.0
            } else {
                (0..4).map(|c| value(cells.at(3, c))).sum::<f64>() / cells.total
            }
        }
        TermKind::MergeValueRatio => {
            if cells.total == 0.0 {
                0.0
            } else {
                let paired: f64 = cells.occupied_pairs().filter(|(a, b)| a == b).map(|(a, _)| value(a)).sum();
                paired / (2.0 * cells.total)
            }
        }
        TermKind::MergeRatio => {
            cells.occupied_pairs().filter(|(a, b)| a == b).count() as f64 / ADJACENT_PAIRS
        }
        TermKind::MonotonicityScore => {
            let bottom = [cells.at(3, 0), cells.at(3, 1), cells.at(3, 2), cells.at(3, 3)];
            let right = [cells.at(0, 3), cells.at(1, 3), cells.at(2, 3), cells.at(3, 3)];
            let mut score = 0.0;
            if line_monotone(bottom, true, true) {
                score += 0.5;
            }
            // Right column, values growing toward the bottom.
            if line_monotone(right, false, true) {
                score += 0.5;
            }
            f64::min(score, 1.0)
        }
        TermKind::SnakeRatio => {
            let satisfied = SNAKE_PATH
                .windows(2)
                .filter(|w| {
                    let a = cells.at(w[0].0, w[0].1);
                    let b = cells.at(w[1].0, w[1].1);
                    a > 0 && b > 0 && a >= b
                })
                .count();
            satisfied as f64 / 15.0
        }
        TermKind::SmoothnessRatio => {
            let s: f64 = cells
                .occupied_pairs()
                .map(|(a, b)| 1.0 / (1.0 + f64::from(a.abs_diff(b))))
                .sum();
            s / ADJACENT_PAIRS
        }
    }
}

/// Weighted sum over several terms, sharing the per-board precomputation.
pub(crate) fn eval_weighted<'a>(terms: impl Iterator<Item = (&'a HeuristicTerm, f64)>, board: Board) -> f64 {
    let cells = Cells::new(board);
    terms.map(|(t, w)| w * eval_kind(t, &cells)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn term(kind: TermKind) -> HeuristicTerm {
        HeuristicTerm::new(kind)
    }

    fn board(rows: [[u32; 4]; 4]) -> Board {
        Board::from_values(rows).unwrap()
    }

    fn at(pos: (usize, usize), v: u32) -> Board {
        let mut rows = [[0u32; 4]; 4];
        rows[pos.0][pos.1] = v;
        board(rows)
    }

    #[test]
    fn empty_board_conventions() {
        assert_eq!(eval_term(&term(TermKind::EmptyRatio), Board::EMPTY), 1.0);
        for k in TermKind::ALL.into_iter().filter(|&k| k != TermKind::EmptyRatio) {
            assert_eq!(eval_term(&term(k), Board::EMPTY), 0.0, "{k}");
        }
    }

    #[test]
    fn bottom_right_proximity_anchor() {
        let b = at((3, 3), 2048);
        // br_proximity = 1, best other corner at distance 3 -> 0.5.
        let v = eval_term(&term(TermKind::CornerProximity), b);
        assert!((v - (0.7 * 1.0 + 0.3 * 0.5)).abs() < 1e-12);
        let only_br = HeuristicTerm {
            kind: TermKind::CornerProximity,
            params: [("br_weight".to_string(), 1.0)].into(),
        };
        assert_eq!(eval_term(&only_br, b), 1.0);
        assert_eq!(eval_term(&only_br, at((0, 0), 2048)), 0.0);
    }

    #[test]
    fn corner_bonus_grades() {
        assert_eq!(eval_term(&term(TermKind::CornerBonus), at((3, 0), 64)), 1.0);
        assert_eq!(eval_term(&term(TermKind::CornerBonus), at((3, 3), 64)), 1.0);
        assert_eq!(eval_term(&term(TermKind::CornerBonus), at((0, 3), 64)), 0.5);
        assert_eq!(eval_term(&term(TermKind::CornerBonus), at((3, 2), 64)), 0.25);
        assert_eq!(eval_term(&term(TermKind::CornerBonus), at((1, 2), 64)), 0.0);
    }

    #[test]
    fn single_pair_merge_ratio() {
        let b = board([[2, 2, 0, 0], [0; 4], [0; 4], [0; 4]]);
        assert_eq!(eval_term(&term(TermKind::MergeRatio), b), 1.0 / 24.0);
        // pair value 2 over twice the total value 4
        assert_eq!(eval_term(&term(TermKind::MergeValueRatio), b), 0.25);
    }

    #[test]
    fn snake_bottom_row_walk() {
        // (3,3)=64, (3,2)=32, (3,1)=16, (3,0)=8: three satisfied pairs along the bottom row.
        let b = board([[0; 4], [0; 4], [0; 4], [8, 16, 32, 64]]);
        assert_eq!(eval_term(&term(TermKind::SnakeRatio), b), 3.0 / 15.0);
        let reversed = board([[0; 4], [0; 4], [0; 4], [64, 32, 16, 8]]);
        assert_eq!(eval_term(&term(TermKind::SnakeRatio), reversed), 0.0);
    }

    #[test]
    fn uniform_board_is_perfectly_smooth() {
        let b = board([[4; 4]; 4]);
        assert_eq!(eval_term(&term(TermKind::SmoothnessRatio), b), 1.0);
        assert_eq!(eval_term(&term(TermKind::MergeRatio), b), 1.0);
        assert_eq!(eval_term(&term(TermKind::MergeValueRatio), b), 0.75);
    }

    #[test]
    fn monotonicity_components() {
        let bottom_only = board([[0; 4], [0; 4], [0; 4], [2, 4, 8, 2]]);
        // bottom row not monotone; right column holds only the 2 -> monotone
        assert_eq!(eval_term(&term(TermKind::MonotonicityScore), bottom_only), 0.5);
        let both = board([[0, 0, 0, 2], [0, 0, 0, 4], [0, 0, 0, 8], [2, 4, 8, 16]]);
        assert_eq!(eval_term(&term(TermKind::MonotonicityScore), both), 1.0);
        let col_up = board([[0, 0, 0, 16], [0, 0, 0, 8], [0; 4], [0, 0, 0, 0]]);
        assert_eq!(eval_term(&term(TermKind::MonotonicityScore), col_up), 0.0);
    }

    #[test]
    fn highest_ratio_clamps() {
        assert_eq!(eval_term(&term(TermKind::HighestRatio), at((0, 0), 2048)), 1.0);
        assert_eq!(eval_term(&term(TermKind::HighestRatio), at((0, 0), 4096)), 1.0);
        assert!((eval_term(&term(TermKind::HighestRatio), at((0, 0), 32)) - 5.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn unknown_names_and_params_are_rejected() {
        assert!(matches!("corner_magic".parse::<TermKind>(), Err(SpecError::UnknownTerm(_))));
        let t = HeuristicTerm {
            kind: TermKind::EmptyRatio,
            params: [("x".to_string(), 1.0)].into(),
        };
        assert!(matches!(t.validate(), Err(SpecError::UnknownParam { .. })));
        let t = HeuristicTerm {
            kind: TermKind::CornerProximity,
            params: [("br_weight".to_string(), 1.5)].into(),
        };
        assert!(matches!(t.validate(), Err(SpecError::InvalidParam { .. })));
    }

    #[test]
    fn corner_and_snake_terms_are_not_symmetric() {
        let b = board([[0; 4], [0; 4], [0; 4], [8, 16, 32, 64]]);
        let mirrored = b.mirror();
        for k in [TermKind::CornerProximity, TermKind::SnakeRatio] {
            assert_ne!(eval_term(&term(k), b), eval_term(&term(k), mirrored), "{k}");
        }
        assert_ne!(
            eval_term(&term(TermKind::BottomRowRatio), b),
            eval_term(&term(TermKind::BottomRowRatio), b.flip())
        );
        assert_ne!(
            eval_term(&term(TermKind::CornerBonus), b),
            eval_term(&term(TermKind::CornerBonus), b.flip())
        );
    }

    fn arb_board() -> impl Strategy<Value = Board> {
        proptest::array::uniform16(0u8..=12).prop_map(|c| Board::from_exponents(c).unwrap())
    }

    proptest! {
        #[test]
        fn every_term_is_in_unit_interval(b in arb_board()) {
            for k in TermKind::ALL {
                let v = eval_term(&term(k), b);
                prop_assert!((0.0..=1.0).contains(&v), "{} = {}", k, v);
            }
        }

        #[test]
        fn symmetric_terms_are_invariant(b in arb_board()) {
            for k in [TermKind::EmptyRatio, TermKind::MergeRatio, TermKind::SmoothnessRatio] {
                let v = eval_term(&term(k), b);
                for s in b.symmetries() {
                    prop_assert!((eval_term(&term(k), s) - v).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn removing_a_tile_never_lowers_empty_ratio(b in arb_board(), idx in 0usize..16) {
            let before = eval_term(&term(TermKind::EmptyRatio), b);
            let after = eval_term(&term(TermKind::EmptyRatio), b.with_cell(idx, 0));
            prop_assert!(after >= before);
        }

        #[test]
        fn moving_highest_tile_toward_br_never_lowers_proximity(r in 0usize..4, c in 0usize..4, down in any::<bool>()) {
            let (r2, c2) = if down { ((r + 1).min(3), c) } else { (r, (c + 1).min(3)) };
            let only_br = HeuristicTerm { kind: TermKind::CornerProximity, params: [("br_weight".to_string(), 1.0)].into() };
            let before = eval_term(&only_br, at((r, c), 256));
            let after = eval_term(&only_br, at((r2, c2), 256));
            prop_assert!(after >= before);
        }
    }
}
