//! Leaf counting for move-generator verification.

use crate::{Board, Move};

/// Counts leaves of the legal game tree `depth` plies below `board`.
///
/// A forced pass consumes one ply; a finished game is a leaf wherever it
/// occurs in the tree.
pub fn perft(board: &Board, depth: u32) -> u64 {
    if depth == 0 {
        return 1;
    }
    let moves = board.legal_moves();
    if moves.is_empty() {
        let passed = board.apply_move(Move::Pass).expect("no legal moves, pass is allowed");
        if passed.legal_moves().is_empty() {
            return 1; // game over
        }
        return perft(&passed, depth - 1);
    }
    moves
        .map(|cell| {
            let next = board.apply_move(Move::Cell(cell)).expect("generated move is legal");
            perft(&next, depth - 1)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perft_depth_one_is_four() {
        assert_eq!(perft(&Board::initial(), 1), 4);
    }

    #[test]
    fn perft_zero_is_one() {
        assert_eq!(perft(&Board::initial(), 0), 1);
    }
}
