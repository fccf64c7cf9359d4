//! Array-based reference rules engine.
//!
//! Everything here works on a plain 64-element array and scans the eight
//! directions cell by cell. It shares no code with the bitboard paths and
//! stays in the tree permanently as the oracle the fast engine is tested
//! against. Do not optimize it.

use crate::{Board, Cell, Move, Player};

/// Board as an array of cell contents plus side to move.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NaiveBoard {
    pub cells: [Option<Player>; 64],
    pub to_move: Player,
}

const DIRECTIONS: [(i32, i32); 8] =
    [(0, 1), (0, -1), (1, 0), (-1, 0), (1, 1), (1, -1), (-1, 1), (-1, -1)];

impl NaiveBoard {
    pub fn from_board(b: &Board) -> NaiveBoard {
        let mut cells = [None; 64];
        for i in 0..64u8 {
            let mask = 1u64 << i;
            if b.black_mask() & mask != 0 {
                cells[i as usize] = Some(Player::Black);
            } else if b.white_mask() & mask != 0 {
                cells[i as usize] = Some(Player::White);
            }
        }
        NaiveBoard { cells, to_move: b.to_move() }
    }

    pub fn to_board(&self) -> Board {
        let mut black = 0u64;
        let mut white = 0u64;
        for (i, c) in self.cells.iter().enumerate() {
            match c {
                Some(Player::Black) => black |= 1 << i,
                Some(Player::White) => white |= 1 << i,
                None => {}
            }
        }
        Board::from_masks(black, white, self.to_move).expect("array cells cannot overlap")
    }

    fn at(&self, row: i32, col: i32) -> Option<Player> {
        if (0..8).contains(&row) && (0..8).contains(&col) {
            self.cells[(row * 8 + col) as usize]
        } else {
            None
        }
    }

    /// Discs flipped by the mover placing on (row, col), by walking each
    /// direction until a friendly disc or a break.
    fn flips_at(&self, row: i32, col: i32) -> Vec<usize> {
        let mut flips = Vec::new();
        if self.cells[(row * 8 + col) as usize].is_some() {
            return flips;
        }
        let me = self.to_move;
        for (dr, dc) in DIRECTIONS {
            let mut run = Vec::new();
            let (mut r, mut c) = (row + dr, col + dc);
            loop {
                if !(0..8).contains(&r) || !(0..8).contains(&c) {
                    run.clear();
                    break;
                }
                match self.at(r, c) {
                    Some(p) if p == me.opponent() => {
                        run.push((r * 8 + c) as usize);
                    }
                    Some(_) => break, // friendly disc seals the run
                    None => {
                        run.clear();
                        break;
                    }
                }
                r += dr;
                c += dc;
            }
            flips.extend(run);
        }
        flips
    }

    pub fn legal_moves(&self) -> Vec<Cell> {
        let mut moves = Vec::new();
        for row in 0..8 {
            for col in 0..8 {
                if !self.flips_at(row, col).is_empty() {
                    moves.push(Cell::from_index((row * 8 + col) as u8).unwrap());
                }
            }
        }
        moves
    }

    /// Applies a move; panics on illegal input (this is test support code).
    pub fn apply_move(&self, m: Move) -> NaiveBoard {
        let mut next = self.clone();
        match m {
            Move::Pass => {
                assert!(self.legal_moves().is_empty(), "pass with moves available");
            }
            Move::Cell(cell) => {
                let flips = self.flips_at(cell.row() as i32, cell.col() as i32);
                assert!(!flips.is_empty(), "illegal move {cell}");
                next.cells[cell.index() as usize] = Some(self.to_move);
                for f in flips {
                    next.cells[f] = Some(self.to_move);
                }
            }
        }
        next.to_move = self.to_move.opponent();
        next
    }

    pub fn is_terminal(&self) -> bool {
        if !self.legal_moves().is_empty() {
            return false;
        }
        let mut passed = self.clone();
        passed.to_move = self.to_move.opponent();
        passed.legal_moves().is_empty()
    }

    pub fn perft(&self, depth: u32) -> u64 {
        if depth == 0 {
            return 1;
        }
        let moves = self.legal_moves();
        if moves.is_empty() {
            if self.is_terminal() {
                return 1;
            }
            return self.apply_move(Move::Pass).perft(depth - 1);
        }
        moves.iter().map(|&m| self.apply_move(Move::Cell(m)).perft(depth - 1)).sum()
    }
}
