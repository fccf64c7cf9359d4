//! Policies: anything that picks a move for a board.
//!
//! Policies are deterministic and immutable after construction; `choose`
//! may be called from many game threads at once. The returned move is
//! always legal, with `Pass` exactly when no legal move exists.

mod ensemble;
mod hybrid;
mod metrics;
mod predictor;

use othello_core::{Board, Cell, Move};
pub use othello_dataset::OUTPUTS;

pub use ensemble::BaggedPolicy;
pub use hybrid::{default_stage_intervals, HybridPolicy, StageInterval};
pub use metrics::{accuracy_grid, masked_topk_accuracy, unmasked_validity_rate, AccuracyGrid};
pub use predictor::PredictorPolicy;

/// A deterministic move-selection strategy.
pub trait Policy: Send + Sync {
    fn name(&self) -> String;

    /// Picks a move. Must return a legal placement, or `Pass` exactly when
    /// the mover has no legal move.
    fn choose(&self, board: &Board) -> Move;

    /// Per-output confidences, for policies that score all 60 moves.
    /// Search-backed policies may return `None`.
    fn confidences(&self, board: &Board) -> Option<[f32; OUTPUTS]> {
        let _ = board;
        None
    }

    /// Batched confidences; predictors override this with real batching.
    fn confidences_batch(&self, boards: &[Board]) -> Option<Vec<[f32; OUTPUTS]>> {
        boards.iter().map(|b| self.confidences(b)).collect()
    }
}

/// Highest-confidence legal move, ties to the lowest cell index; `Pass`
/// when there is no legal move.
pub fn choose_from_confidences(board: &Board, confidences: &[f32; OUTPUTS]) -> Move {
    let mut best: Option<(Cell, f32)> = None;
    for cell in board.legal_moves() {
        let index = othello_dataset::target_index(cell)
            .expect("legal moves are never center cells") as usize;
        let score = confidences[index];
        let better = match best {
            None => true,
            Some((_, current)) => score > current, // first hit wins ties: cells ascend
        };
        if better {
            best = Some((cell, score));
        }
    }
    best.map_or(Move::Pass, |(cell, _)| Move::Cell(cell))
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum Error {
    #[error("encoding provides {encoding} channels but the network expects {network}")]
    MismatchedChannels { encoding: usize, network: usize },
    #[error("network error: {0}")]
    Network(#[from] othello_nn::Error),
    #[error("a bagged policy needs at least one member")]
    EmptyBag,
    #[error("bag members must share one architecture and encoding")]
    MixedBagMembers,
    #[error("bad stage intervals: {0}")]
    BadStages(String),
    #[error("no stage covers move number {0}")]
    NoStage(u32),
    #[error("policy exposes no confidences")]
    ConfidencesUnavailable,
    #[error("dataset is empty")]
    EmptyDataset,
}
