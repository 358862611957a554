use std::fmt;

use serde::{Deserialize, Serialize};

use super::EngineError;

/// Largest exponent a packed cell can hold (tile 32768).
pub const MAX_EXPONENT: u8 = 15;

/// A 4x4 board packed into one `u64`, four bits per cell.
///
/// Cell `(row, col)` lives in nibble `4 * row + col`; row 0 is the top row and
/// column 0 the left column, so `(3, 3)` is the bottom-right corner. A nibble
/// holds the tile exponent `e` (tile value `2^e`) or 0 for an empty cell.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Board(u64);

impl Board {
    pub const EMPTY: Board = Board(0);

    /// Every `u64` is a valid packed board.
    pub const fn from_raw(raw: u64) -> Self {
        Board(raw)
    }

    pub const fn raw(self) -> u64 {
        self.0
    }

    pub fn from_exponents(cells: [u8; 16]) -> Result<Self, EngineError> {
        let mut raw = 0u64;
        for (i, &e) in cells.iter().enumerate() {
            if e > MAX_EXPONENT {
                return Err(EngineError::ExponentOutOfRange { cell: i, exponent: e });
            }
            raw |= u64::from(e) << (4 * i);
        }
        Ok(Board(raw))
    }

    pub fn exponents(self) -> [u8; 16] {
        let mut out = [0u8; 16];
        for (i, cell) in out.iter_mut().enumerate() {
            *cell = self.cell(i);
        }
        out
    }

    /// Builds a board from tile values (0 for empty). Values must be powers of two >= 2.
    pub fn from_values(rows: [[u32; 4]; 4]) -> Result<Self, EngineError> {
        let mut cells = [0u8; 16];
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                cells[4 * r + c] = match v {
                    0 => 0,
                    v if v >= 2 && v.is_power_of_two() => v.trailing_zeros() as u8,
                    v => return Err(EngineError::InvalidTileValue(v)),
                };
            }
        }
        Board::from_exponents(cells)
    }

    pub fn values(self) -> [[u32; 4]; 4] {
        let mut out = [[0u32; 4]; 4];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = self.value(r, c);
            }
        }
        out
    }

    #[inline]
    pub fn cell(self, index: usize) -> u8 {
        ((self.0 >> (4 * index)) & 0xF) as u8
    }

    #[inline]
    pub fn get(self, row: usize, col: usize) -> u8 {
        self.cell(4 * row + col)
    }

    /// Tile value at `(row, col)`, 0 when empty.
    #[inline]
    pub fn value(self, row: usize, col: usize) -> u32 {
        exp_value(self.get(row, col))
    }

    #[inline]
    pub fn with_cell(self, index: usize, exponent: u8) -> Board {
        debug_assert!(exponent <= MAX_EXPONENT);
        let shift = 4 * index;
        Board((self.0 & !(0xF << shift)) | (u64::from(exponent) << shift))
    }

    #[inline]
    pub fn row_bits(self, row: usize) -> u16 {
        (self.0 >> (16 * row)) as u16
    }

    pub fn empty_count(self) -> u32 {
        // A nibble is empty iff all four of its bits are clear.
        let x = self.0;
        let mut nz = x | (x >> 1);
        nz |= nz >> 2;
        let occupied = (nz & 0x1111_1111_1111_1111).count_ones();
        16 - occupied
    }

    pub fn empty_cells(self) -> impl Iterator<Item = usize> {
        (0..16).filter(move |&i| self.cell(i) == 0)
    }

    pub fn max_exponent(self) -> u8 {
        (0..16).map(|i| self.cell(i)).max().unwrap_or(0)
    }

    /// Largest tile value on the board, 0 for the empty board.
    pub fn highest_tile(self) -> u32 {
        exp_value(self.max_exponent())
    }

    /// Sum of all tile values.
    pub fn tile_sum(self) -> u64 {
        (0..16).map(|i| u64::from(exp_value(self.cell(i)))).sum()
    }

    /// Swaps rows and columns.
    pub fn transpose(self) -> Board {
        let x = self.0;
        let a1 = x & 0xF0F0_0F0F_F0F0_0F0F;
        let a2 = x & 0x0000_F0F0_0000_F0F0;
        let a3 = x & 0x0F0F_0000_0F0F_0000;
        let a = a1 | (a2 << 12) | (a3 >> 12);
        let b1 = a & 0xFF00_FF00_00FF_00FF;
        let b2 = a & 0x00FF_00FF_0000_0000;
        let b3 = a & 0x0000_0000_FF00_FF00;
        Board(b1 | (b2 >> 24) | (b3 << 24))
    }

    /// Mirrors left-right.
    pub fn mirror(self) -> Board {
        let mut out = 0u64;
        for r in 0..4 {
            out |= u64::from(reverse_row(self.row_bits(r))) << (16 * r);
        }
        Board(out)
    }

    /// Mirrors top-bottom.
    pub fn flip(self) -> Board {
        let x = self.0;
        Board((x << 48) | ((x << 16) & 0x0000_FFFF_0000_0000) | ((x >> 16) & 0x0000_0000_FFFF_0000) | (x >> 48))
    }

    /// The eight images of the board under the dihedral group of the square.
    pub fn symmetries(self) -> [Board; 8] {
        let t = self.transpose();
        [
            self,
            self.mirror(),
            self.flip(),
            self.mirror().flip(),
            t,
            t.mirror(),
            t.flip(),
            t.mirror().flip(),
        ]
    }
}

#[inline]
pub(crate) fn exp_value(e: u8) -> u32 {
    if e == 0 {
        0
    } else {
        1u32 << e
    }
}

#[inline]
pub(crate) fn reverse_row(row: u16) -> u16 {
    (row >> 12) | ((row >> 4) & 0x00F0) | ((row << 4) & 0x0F00) | (row << 12)
}

impl fmt::Debug for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Board({:?})", self.exponents())
    }
}

impl fmt::Display for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..4 {
            for c in 0..4 {
                if c > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{:>5}", self.value(r, c))?;
            }
            if r < 3 {
                f.write_str("\n")?;
            }
        }
        Ok(())
    }
}

impl Serialize for Board {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.exponents().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Board {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let cells = <[u8; 16]>::deserialize(d)?;
        Board::from_exponents(cells).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_transpose(b: Board) -> Board {
        let mut out = Board::EMPTY;
        for r in 0..4 {
            for c in 0..4 {
                out = out.with_cell(4 * c + r, b.get(r, c));
            }
        }
        out
    }

    #[test]
    fn values_and_positions() {
        let b = Board::from_values([[2, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 2048]]).unwrap();
        assert_eq!(b.get(0, 0), 1);
        assert_eq!(b.get(3, 3), 11);
        assert_eq!(b.highest_tile(), 2048);
        assert_eq!(b.empty_count(), 14);
        assert_eq!(b.tile_sum(), 2050);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(Board::from_values([[3, 0, 0, 0], [0; 4], [0; 4], [0; 4]]).is_err());
        assert!(Board::from_values([[1, 0, 0, 0], [0; 4], [0; 4], [0; 4]]).is_err());
        let mut cells = [0u8; 16];
        cells[5] = 16;
        assert!(matches!(
            Board::from_exponents(cells),
            Err(EngineError::ExponentOutOfRange { cell: 5, exponent: 16 })
        ));
    }

    #[test]
    fn empty_board_has_no_highest_tile() {
        assert_eq!(Board::EMPTY.highest_tile(), 0);
        assert_eq!(Board::EMPTY.empty_count(), 16);
    }

    proptest! {
        #[test]
        fn packed_and_unpacked_round_trip(raw in any::<u64>()) {
            let b = Board::from_raw(raw);
            prop_assert_eq!(Board::from_exponents(b.exponents()).unwrap(), b);
            let json = serde_json::to_string(&b).unwrap();
            prop_assert_eq!(serde_json::from_str::<Board>(&json).unwrap(), b);
        }

        #[test]
        fn bit_transpose_matches_naive(raw in any::<u64>()) {
            let b = Board::from_raw(raw);
            prop_assert_eq!(b.transpose(), naive_transpose(b));
            prop_assert_eq!(b.transpose().transpose(), b);
            prop_assert_eq!(b.flip().flip(), b);
            prop_assert_eq!(b.mirror().mirror(), b);
        }

        #[test]
        fn empty_count_matches_scan(raw in any::<u64>()) {
            let b = Board::from_raw(raw);
            prop_assert_eq!(b.empty_count() as usize, b.empty_cells().count());
        }
    }
}
