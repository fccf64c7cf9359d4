//! Bitboard game state and the rules of play.

use std::fmt;
use std::str::FromStr;

use crate::{Cell, CellSet, Error, Move, Symmetry};

/// Side to move or disc color.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Player {
    Black,
    White,
}

impl Player {
    #[inline]
    pub const fn opponent(self) -> Player {
        match self {
            Player::Black => Player::White,
            Player::White => Player::Black,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::Black => write!(f, "X"),
            Player::White => write!(f, "O"),
        }
    }
}

// Shift masks: a disc may only step east if it is not on the h-file, etc.
const NOT_FILE_A: u64 = 0xfefe_fefe_fefe_fefe;
const NOT_FILE_H: u64 = 0x7f7f_7f7f_7f7f_7f7f;

/// One cell step along a compass direction, with edge wraparound masked off.
#[inline]
fn shift(mask: u64, dir: usize) -> u64 {
    match dir {
        0 => (mask << 1) & NOT_FILE_A,  // east
        1 => (mask >> 1) & NOT_FILE_H,  // west
        2 => mask << 8,                 // north (towards rank 8)
        3 => mask >> 8,                 // south
        4 => (mask << 9) & NOT_FILE_A,  // north-east
        5 => (mask << 7) & NOT_FILE_H,  // north-west
        6 => (mask >> 7) & NOT_FILE_A,  // south-east
        7 => (mask >> 9) & NOT_FILE_H,  // south-west
        _ => unreachable!(),
    }
}

/// Cells where the mover may legally place a disc, as a bitmask.
///
/// This is the mask-level primitive shared by [`Board`] and
/// [`CanonicalBoard`]; a move is legal iff it encloses at least one opponent
/// disc in some direction.
#[inline]
pub fn legal_moves_mask(mover: u64, opponent: u64) -> u64 {
    let empty = !(mover | opponent);
    let mut moves = 0u64;
    for dir in 0..8 {
        // Grow runs of opponent discs adjacent to mover discs; a legal
        // landing square is the first empty cell past such a run.
        let mut run = shift(mover, dir) & opponent;
        for _ in 0..5 {
            run |= shift(run, dir) & opponent;
        }
        moves |= shift(run, dir) & empty;
    }
    moves
}

/// Opponent discs flipped by placing a mover disc on `cell`.
///
/// Zero means the placement is illegal.
#[inline]
pub fn flips_mask(cell: Cell, mover: u64, opponent: u64) -> u64 {
    let placed = cell.mask();
    if (mover | opponent) & placed != 0 {
        return 0;
    }
    let mut flipped = 0u64;
    for dir in 0..8 {
        let mut run = 0u64;
        let mut probe = shift(placed, dir);
        while probe & opponent != 0 {
            run |= probe;
            probe = shift(probe, dir);
        }
        if probe & mover != 0 {
            flipped |= run;
        }
    }
    flipped
}

/// Full game state: both occupancy masks plus the side to move.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Board {
    black: u64,
    white: u64,
    to_move: Player,
}

impl Board {
    /// The standard starting position: black on d5 and e4, white on d4 and
    /// e5, black to move.
    pub const fn initial() -> Board {
        Board {
            black: (1u64 << 28) | (1u64 << 35), // e4, d5
            white: (1u64 << 27) | (1u64 << 36), // d4, e5
            to_move: Player::Black,
        }
    }

    /// Builds a board from raw masks, rejecting overlapping occupancy.
    pub fn from_masks(black: u64, white: u64, to_move: Player) -> Result<Board, Error> {
        if black & white != 0 {
            return Err(Error::OverlappingMasks);
        }
        Ok(Board { black, white, to_move })
    }

    #[inline]
    pub const fn black_mask(&self) -> u64 {
        self.black
    }

    #[inline]
    pub const fn white_mask(&self) -> u64 {
        self.white
    }

    #[inline]
    pub const fn to_move(&self) -> Player {
        self.to_move
    }

    #[inline]
    pub const fn occupied(&self) -> u64 {
        self.black | self.white
    }

    #[inline]
    pub const fn mover_mask(&self) -> u64 {
        match self.to_move {
            Player::Black => self.black,
            Player::White => self.white,
        }
    }

    #[inline]
    pub const fn opponent_mask(&self) -> u64 {
        match self.to_move {
            Player::Black => self.white,
            Player::White => self.black,
        }
    }

    #[inline]
    pub const fn discs(&self, p: Player) -> u32 {
        match p {
            Player::Black => self.black.count_ones(),
            Player::White => self.white.count_ones(),
        }
    }

    /// Cells where the side to move may place a disc.
    #[inline]
    pub fn legal_moves(&self) -> CellSet {
        CellSet::from_mask(legal_moves_mask(self.mover_mask(), self.opponent_mask()))
    }

    /// Plays a move. Placement must be legal; `Pass` is accepted only when
    /// the mover has no legal move.
    pub fn apply_move(&self, m: Move) -> Result<Board, Error> {
        match m {
            Move::Pass => {
                if !self.legal_moves().is_empty() {
                    return Err(Error::IllegalMove(m));
                }
                Ok(self.passed())
            }
            Move::Cell(cell) => {
                let flipped = flips_mask(cell, self.mover_mask(), self.opponent_mask());
                if flipped == 0 {
                    return Err(Error::IllegalMove(m));
                }
                let mover = self.mover_mask() | flipped | cell.mask();
                let opponent = self.opponent_mask() & !flipped;
                let (black, white) = match self.to_move {
                    Player::Black => (mover, opponent),
                    Player::White => (opponent, mover),
                };
                Ok(Board { black, white, to_move: self.to_move.opponent() })
            }
        }
    }

    /// Swaps the side to move without touching the discs.
    #[inline]
    fn passed(&self) -> Board {
        Board { to_move: self.to_move.opponent(), ..*self }
    }

    /// The game ends when neither side has a legal move.
    pub fn is_terminal(&self) -> bool {
        self.legal_moves().is_empty() && self.passed().legal_moves().is_empty()
    }

    /// Final disc counts. Errors unless the position is terminal.
    pub fn outcome(&self) -> Result<GameOutcome, Error> {
        if !self.is_terminal() {
            return Err(Error::NotTerminal);
        }
        Ok(GameOutcome {
            black_discs: self.black.count_ones() as u8,
            white_discs: self.white.count_ones() as u8,
        })
    }

    /// Relabels the board under one of the eight symmetries.
    #[inline]
    pub fn transform(&self, s: Symmetry) -> Board {
        Board {
            black: s.apply_mask(self.black),
            white: s.apply_mask(self.white),
            to_move: self.to_move,
        }
    }

    /// Re-expresses the position from the mover's perspective.
    #[inline]
    pub fn canonical(&self) -> CanonicalBoard {
        CanonicalBoard { mover: self.mover_mask(), opponent: self.opponent_mask() }
    }
}

/// A position seen from the side to move: whoever moves owns `mover`.
///
/// Black-to-move boards map to themselves; white-to-move boards have their
/// piece sets swapped.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CanonicalBoard {
    mover: u64,
    opponent: u64,
}

impl CanonicalBoard {
    pub fn from_masks(mover: u64, opponent: u64) -> Result<CanonicalBoard, Error> {
        if mover & opponent != 0 {
            return Err(Error::OverlappingMasks);
        }
        Ok(CanonicalBoard { mover, opponent })
    }

    #[inline]
    pub const fn mover_mask(&self) -> u64 {
        self.mover
    }

    #[inline]
    pub const fn opponent_mask(&self) -> u64 {
        self.opponent
    }

    #[inline]
    pub fn legal_moves(&self) -> CellSet {
        CellSet::from_mask(legal_moves_mask(self.mover, self.opponent))
    }

    #[inline]
    pub fn transform(&self, s: Symmetry) -> CanonicalBoard {
        CanonicalBoard {
            mover: s.apply_mask(self.mover),
            opponent: s.apply_mask(self.opponent),
        }
    }

    /// The equivalent full board with black as the mover.
    #[inline]
    pub fn to_board(&self) -> Board {
        Board { black: self.mover, white: self.opponent, to_move: Player::Black }
    }
}

/// Terminal disc counts.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct GameOutcome {
    pub black_discs: u8,
    pub white_discs: u8,
}

impl GameOutcome {
    /// `None` means a draw.
    #[inline]
    pub fn winner(&self) -> Option<Player> {
        match self.black_discs.cmp(&self.white_discs) {
            std::cmp::Ordering::Greater => Some(Player::Black),
            std::cmp::Ordering::Less => Some(Player::White),
            std::cmp::Ordering::Equal => None,
        }
    }

    /// Tournament points for `side`: win 1, draw 0.5, loss 0.
    #[inline]
    pub fn points_for(&self, side: Player) -> f64 {
        match self.winner() {
            Some(w) if w == side => 1.0,
            Some(_) => 0.0,
            None => 0.5,
        }
    }
}

impl fmt::Display for Board {
    /// Eight lines of eight characters from rank 8 down to rank 1 (`X`
    /// black, `O` white, `-` empty), then `X to move` or `O to move`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in (0..8).rev() {
            for col in 0..8 {
                let mask = 1u64 << (row * 8 + col);
                let ch = if self.black & mask != 0 {
                    'X'
                } else if self.white & mask != 0 {
                    'O'
                } else {
                    '-'
                };
                write!(f, "{ch}")?;
            }
            writeln!(f)?;
        }
        write!(f, "{} to move", self.to_move)
    }
}

impl FromStr for Board {
    type Err = Error;

    fn from_str(s: &str) -> Result<Board, Error> {
        let lines: Vec<&str> = s.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        if lines.len() != 9 {
            return Err(Error::BadBoardText("expected 8 rank lines and a side-to-move line".into()));
        }
        let mut black = 0u64;
        let mut white = 0u64;
        for (i, line) in lines[..8].iter().enumerate() {
            let row = 7 - i as u64;
            if line.len() != 8 {
                return Err(Error::BadBoardText(format!("rank line {} has length {}", i + 1, line.len())));
            }
            for (col, ch) in line.chars().enumerate() {
                let mask = 1u64 << (row * 8 + col as u64);
                match ch {
                    'X' => black |= mask,
                    'O' => white |= mask,
                    '-' => {}
                    other => return Err(Error::BadBoardText(format!("unexpected character {other:?}"))),
                }
            }
        }
        let to_move = match lines[8] {
            "X to move" => Player::Black,
            "O to move" => Player::White,
            other => return Err(Error::BadBoardText(format!("bad side-to-move line {other:?}"))),
        };
        Board::from_masks(black, white, to_move)
    }
}
