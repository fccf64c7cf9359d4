//! Cells and moves.
//!
//! Cells are indexed row-major with a1 = 0, b1 = 1, ..., h8 = 63. Every
//! crate in the workspace shares this one convention.

use std::fmt;
use std::str::FromStr;

use crate::Error;

/// A single board square, index 0..=63 (a1 = 0, h8 = 63).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Cell(u8);

impl Cell {
    pub const COUNT: usize = 64;

    /// Builds a cell from a raw index. `None` when `index >= 64`.
    #[inline]
    pub const fn from_index(index: u8) -> Option<Cell> {
        if index < 64 {
            Some(Cell(index))
        } else {
            None
        }
    }

    /// Builds a cell from 0-based row (rank - 1) and column (file) numbers.
    #[inline]
    pub const fn from_coords(row: u8, col: u8) -> Option<Cell> {
        if row < 8 && col < 8 {
            Some(Cell(row * 8 + col))
        } else {
            None
        }
    }

    #[inline]
    pub const fn index(self) -> u8 {
        self.0
    }

    /// 0-based rank: a1..h1 are row 0.
    #[inline]
    pub const fn row(self) -> u8 {
        self.0 / 8
    }

    /// 0-based file: the a-file is column 0.
    #[inline]
    pub const fn col(self) -> u8 {
        self.0 % 8
    }

    #[inline]
    pub const fn mask(self) -> u64 {
        1u64 << self.0
    }

    /// All 64 cells in index order.
    pub fn all() -> impl Iterator<Item = Cell> {
        (0..64).map(Cell)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", (b'a' + self.col()) as char, self.row() + 1)
    }
}

impl FromStr for Cell {
    type Err = Error;

    /// Parses coordinates like "f5" (case-insensitive).
    fn from_str(s: &str) -> Result<Cell, Error> {
        let bytes = s.as_bytes();
        if bytes.len() != 2 {
            return Err(Error::BadCellName(s.to_string()));
        }
        let col = bytes[0].to_ascii_lowercase();
        let row = bytes[1];
        if !(b'a'..=b'h').contains(&col) || !(b'1'..=b'8').contains(&row) {
            return Err(Error::BadCellName(s.to_string()));
        }
        Ok(Cell((row - b'1') * 8 + (col - b'a')))
    }
}

/// A move: either placing a disc on a cell, or passing.
///
/// Pass is explicit; game loops must pass exactly when the mover has no
/// legal move and the game is not over.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Move {
    Cell(Cell),
    Pass,
}

impl Move {
    #[inline]
    pub const fn cell(self) -> Option<Cell> {
        match self {
            Move::Cell(c) => Some(c),
            Move::Pass => None,
        }
    }

    #[inline]
    pub const fn is_pass(self) -> bool {
        matches!(self, Move::Pass)
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Cell(c) => write!(f, "{c}"),
            Move::Pass => write!(f, "pass"),
        }
    }
}

impl FromStr for Move {
    type Err = Error;

    fn from_str(s: &str) -> Result<Move, Error> {
        if s.eq_ignore_ascii_case("pass") {
            Ok(Move::Pass)
        } else {
            s.parse::<Cell>().map(Move::Cell)
        }
    }
}

/// A set of cells backed by a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Default, Debug)]
pub struct CellSet(u64);

impl CellSet {
    #[inline]
    pub const fn from_mask(mask: u64) -> CellSet {
        CellSet(mask)
    }

    #[inline]
    pub const fn mask(self) -> u64 {
        self.0
    }

    #[inline]
    pub const fn contains(self, c: Cell) -> bool {
        self.0 & c.mask() != 0
    }

    #[inline]
    pub const fn len(self) -> u32 {
        self.0.count_ones()
    }

    #[inline]
    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }
}

impl Iterator for CellSet {
    type Item = Cell;

    /// Yields cells in ascending index order.
    #[inline]
    fn next(&mut self) -> Option<Cell> {
        if self.0 == 0 {
            return None;
        }
        let index = self.0.trailing_zeros() as u8;
        self.0 &= self.0 - 1;
        Some(Cell(index))
    }
}
