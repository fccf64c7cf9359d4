//! Board evaluation heuristics, always from the mover's perspective.

use othello_core::{Board, CellSet, Symmetry};

use crate::Error;

/// The classic corner-dominant weight table: corners huge, squares next to
/// corners poisonous, edges mildly good.
pub const CLASSIC_WPC_WEIGHTS: [f64; 64] = [
    100.0, -20.0, 10.0, 5.0, 5.0, 10.0, -20.0, 100.0,
    -20.0, -50.0, -2.0, -2.0, -2.0, -2.0, -50.0, -20.0,
    10.0, -2.0, -1.0, -1.0, -1.0, -1.0, -2.0, 10.0,
    5.0, -2.0, -1.0, -1.0, -1.0, -1.0, -2.0, 5.0,
    5.0, -2.0, -1.0, -1.0, -1.0, -1.0, -2.0, 5.0,
    10.0, -2.0, -1.0, -1.0, -1.0, -1.0, -2.0, 10.0,
    -20.0, -50.0, -2.0, -2.0, -2.0, -2.0, -50.0, -20.0,
    100.0, -20.0, 10.0, 5.0, 5.0, 10.0, -20.0, 100.0,
];

const CORNERS: u64 = 0x8100_0000_0000_0081;

/// A heuristic evaluation. Every variant is antisymmetric: swapping sides
/// negates the value.
#[derive(Clone, Debug)]
pub enum EvalFn {
    /// Weighted piece counter: per-cell weights summed over the mover's
    /// discs minus the opponent's. The table is symmetrized over the eight
    /// board symmetries at construction.
    Wpc { weights: Box<[f64; 64]> },
    /// Plain disc differential.
    DiscDiff,
    /// Disc, mobility and corner differentials combined.
    MobilityMix { disc_weight: f64, mobility_weight: f64, corner_weight: f64 },
}

/// Builds a WPC evaluation, averaging the table over the symmetry group so
/// equivalent cells always score alike.
pub fn weighted_piece_counter(weights: &[f64]) -> Result<EvalFn, Error> {
    let table: &[f64; 64] =
        weights.try_into().map_err(|_| Error::BadWeightCount(weights.len()))?;
    let mut symmetrized = [0.0f64; 64];
    for (i, slot) in symmetrized.iter_mut().enumerate() {
        let cell = othello_core::Cell::from_index(i as u8).unwrap();
        let orbit_sum: f64 =
            Symmetry::ALL.iter().map(|s| table[s.apply_cell(cell).index() as usize]).sum();
        *slot = orbit_sum / 8.0;
    }
    Ok(EvalFn::Wpc { weights: Box::new(symmetrized) })
}

/// The default mobility blend.
pub fn mobility_mix() -> EvalFn {
    EvalFn::MobilityMix { disc_weight: 1.0, mobility_weight: 4.0, corner_weight: 30.0 }
}

impl EvalFn {
    /// Parses a whitespace-separated 64-value weight table.
    pub fn wpc_from_text(text: &str) -> Result<EvalFn, Error> {
        let values: Result<Vec<f64>, Error> = text
            .split_whitespace()
            .map(|tok| tok.parse::<f64>().map_err(|_| Error::BadWeight(tok.to_string())))
            .collect();
        weighted_piece_counter(&values?)
    }

    /// Upper bound on |evaluate| over all positions, used to scale exact
    /// terminal values above every heuristic one.
    pub fn magnitude_bound(&self) -> f64 {
        match self {
            EvalFn::Wpc { weights } => weights.iter().map(|w| w.abs()).sum(),
            EvalFn::DiscDiff => 64.0,
            EvalFn::MobilityMix { disc_weight, mobility_weight, corner_weight } => {
                64.0 * disc_weight.abs() + 64.0 * mobility_weight.abs() + 8.0 * corner_weight.abs()
            }
        }
    }

    /// Scores the position for the side to move.
    pub fn evaluate(&self, board: &Board) -> f64 {
        let mover = board.mover_mask();
        let opponent = board.opponent_mask();
        match self {
            EvalFn::Wpc { weights } => {
                let mut value = 0.0;
                for cell in CellSet::from_mask(mover) {
                    value += weights[cell.index() as usize];
                }
                for cell in CellSet::from_mask(opponent) {
                    value -= weights[cell.index() as usize];
                }
                value
            }
            EvalFn::DiscDiff => mover.count_ones() as f64 - opponent.count_ones() as f64,
            EvalFn::MobilityMix { disc_weight, mobility_weight, corner_weight } => {
                let discs = mover.count_ones() as f64 - opponent.count_ones() as f64;
                let my_moves = othello_core::legal_moves_mask(mover, opponent).count_ones() as f64;
                let their_moves =
                    othello_core::legal_moves_mask(opponent, mover).count_ones() as f64;
                let corners = (mover & CORNERS).count_ones() as f64
                    - (opponent & CORNERS).count_ones() as f64;
                disc_weight * discs
                    + mobility_weight * (my_moves - their_moves)
                    + corner_weight * corners
            }
        }
    }
}
