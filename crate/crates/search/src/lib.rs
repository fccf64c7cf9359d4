//! Deterministic fixed-depth alpha-beta opponents.
//!
//! Stand-ins for the reference engines: exact negamax with configurable
//! heuristics, no pruning extensions, no transposition table. Search is a
//! pure function of the position and configuration.

mod eval;
mod negamax;

pub use eval::{mobility_mix, weighted_piece_counter, EvalFn, CLASSIC_WPC_WEIGHTS};
pub use negamax::{negamax, SearchConfig, SearchResult, TERMINAL_SCALE};

use othello_core::{Board, Move};
use othello_policy::Policy;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum Error {
    #[error("weight table needs 64 values, found {0}")]
    BadWeightCount(usize),
    #[error("cannot parse weight {0:?}")]
    BadWeight(String),
    #[error("search depth must be at least 1")]
    ZeroDepth,
}

/// A fixed-depth searcher as a tournament policy.
pub struct SearchPolicy {
    config: SearchConfig,
    label: String,
}

impl SearchPolicy {
    pub fn new(label: impl Into<String>, config: SearchConfig) -> SearchPolicy {
        SearchPolicy { config, label: label.into() }
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }
}

impl Policy for SearchPolicy {
    fn name(&self) -> String {
        format!("{}-{}", self.label, self.config.depth)
    }

    fn choose(&self, board: &Board) -> Move {
        negamax(board, &self.config).best
    }
}
