//! Othello rules engine.
//!
//! Bitboard game state, legal-move generation, the eight board symmetries
//! and mover-perspective canonicalization. All operations are pure functions
//! of their inputs; values are `Copy` and freely shareable across threads.

mod board;
mod cell;
#[cfg(feature = "naive")]
pub mod naive;
mod perft;
mod symmetry;

pub use board::{flips_mask, legal_moves_mask, Board, CanonicalBoard, GameOutcome, Player};
pub use cell::{Cell, CellSet, Move};
pub use perft::perft;
pub use symmetry::Symmetry;

/// Errors from rules operations and board parsing.
#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum Error {
    #[error("illegal move: {0}")]
    IllegalMove(Move),
    #[error("position is not terminal")]
    NotTerminal,
    #[error("black and white masks overlap")]
    OverlappingMasks,
    #[error("bad cell name: {0:?}")]
    BadCellName(String),
    #[error("bad board text: {0}")]
    BadBoardText(String),
}
