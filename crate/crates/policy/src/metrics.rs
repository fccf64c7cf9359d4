//! Prediction-quality analytics over datasets.

use std::collections::BTreeMap;

use othello_core::Board;
use othello_dataset::{target_index, Dataset, Triple};

use crate::{Error, Policy, PredictorPolicy, OUTPUTS};

fn boards_of(triples: &[Triple]) -> Vec<Board> {
    triples.iter().map(|t| t.board.to_board()).collect()
}

/// How often the single most excited output (over all 60, no legality
/// mask) happens to be a legal move. Returns a percentage.
pub fn unmasked_validity_rate(policy: &PredictorPolicy, dataset: &Dataset) -> Result<f64, Error> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let boards = boards_of(&dataset.triples);
    let distributions = policy.predict_batch(&boards);
    let mut valid = 0usize;
    for (d, t) in distributions.iter().zip(&dataset.triples) {
        let mut best = 0usize;
        for (i, &v) in d.iter().enumerate() {
            if v > d[best] {
                best = i;
            }
        }
        let cell = othello_dataset::index_cell(best as u8).unwrap();
        if t.board.legal_moves().contains(cell) {
            valid += 1;
        }
    }
    Ok(100.0 * valid as f64 / dataset.len() as f64)
}

/// Rank of the target among the *legal* moves by confidence (ties to the
/// lower cell index). The target is always legal, so this is at most
/// `legal_count - 1`.
fn masked_rank(t: &Triple, confidences: &[f32; OUTPUTS]) -> usize {
    let target_idx = target_index(t.target).expect("targets are never center cells") as usize;
    let target_score = confidences[target_idx];
    let mut rank = 0usize;
    for cell in t.board.legal_moves() {
        let idx = target_index(cell).unwrap() as usize;
        let score = confidences[idx];
        if score > target_score || (score == target_score && idx < target_idx) {
            rank += 1;
        }
    }
    rank
}

/// Fraction of examples whose recorded move is among the `k` most
/// confident legal moves, for each requested `k`.
pub fn masked_topk_accuracy(
    policy: &dyn Policy,
    dataset: &Dataset,
    ks: &[usize],
) -> Result<Vec<f64>, Error> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let boards = boards_of(&dataset.triples);
    let distributions =
        policy.confidences_batch(&boards).ok_or(Error::ConfidencesUnavailable)?;
    let mut hits = vec![0u64; ks.len()];
    for (t, d) in dataset.triples.iter().zip(&distributions) {
        let rank = masked_rank(t, d);
        for (slot, &k) in hits.iter_mut().zip(ks) {
            if rank < k {
                *slot += 1;
            }
        }
    }
    Ok(hits.into_iter().map(|h| h as f64 / dataset.len() as f64).collect())
}

/// Top-k accuracy factored by move number and legal-move count.
///
/// Move numbers follow the piece count, so the game's first decision is
/// move 5; it is omitted because it is unique under the board symmetries,
/// and rows therefore start at 6. Examples without recorded move numbers
/// (plies loaded from disk) are skipped.
#[derive(Clone, Debug)]
pub struct AccuracyGrid {
    pub ks: Vec<usize>,
    /// (move number, legal-move count) -> (examples, hits per k).
    pub cells: BTreeMap<(u8, u8), (u64, Vec<u64>)>,
}

impl AccuracyGrid {
    /// Aggregate (hits, total) over all cells for the `i`-th requested k.
    pub fn totals(&self, i: usize) -> (u64, u64) {
        let mut hits = 0u64;
        let mut total = 0u64;
        for (count, per_k) in self.cells.values() {
            total += count;
            hits += per_k[i];
        }
        (hits, total)
    }

    /// Overall accuracy for the `i`-th requested k.
    pub fn marginal(&self, i: usize) -> f64 {
        let (hits, total) = self.totals(i);
        if total == 0 {
            return 0.0;
        }
        hits as f64 / total as f64
    }

    /// Per-cell accuracy for the `i`-th requested k.
    pub fn cell_accuracy(&self, move_number: u8, legal: u8, i: usize) -> Option<f64> {
        self.cells
            .get(&(move_number, legal))
            .map(|(count, per_k)| per_k[i] as f64 / *count as f64)
    }

    /// Tab-separated dump: `move_number legal_moves examples top<k>...`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("move_number\tlegal_moves\texamples");
        for k in &self.ks {
            out.push_str(&format!("\ttop{k}"));
        }
        out.push('\n');
        for ((move_number, legal), (count, per_k)) in &self.cells {
            out.push_str(&format!("{move_number}\t{legal}\t{count}"));
            for hits in per_k {
                out.push_str(&format!("\t{:.4}", *hits as f64 / *count as f64));
            }
            out.push('\n');
        }
        out
    }
}

pub fn accuracy_grid(
    policy: &dyn Policy,
    dataset: &Dataset,
    ks: &[usize],
) -> Result<AccuracyGrid, Error> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    // The first decision of a game (ply 1, move number 5) is symmetric;
    // factored analysis starts one move later.
    let kept: Vec<&Triple> = dataset.triples.iter().filter(|t| t.ply >= 2).collect();
    let boards: Vec<Board> = kept.iter().map(|t| t.board.to_board()).collect();
    let distributions =
        policy.confidences_batch(&boards).ok_or(Error::ConfidencesUnavailable)?;

    let mut cells: BTreeMap<(u8, u8), (u64, Vec<u64>)> = BTreeMap::new();
    for (t, d) in kept.iter().zip(&distributions) {
        let move_number = t.ply + 4;
        let legal = t.board.legal_moves().len() as u8;
        let rank = masked_rank(t, d);
        let (count, per_k) = cells.entry((move_number, legal)).or_insert_with(|| (0, vec![0; ks.len()]));
        *count += 1;
        for (slot, &k) in per_k.iter_mut().zip(ks) {
            if rank < k {
                *slot += 1;
            }
        }
    }
    Ok(AccuracyGrid { ks: ks.to_vec(), cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predictor::tests::tiny_predictor;
    use othello_core::CanonicalBoard;
    use othello_dataset::EncodingScheme;

    fn small_dataset(plies: &[u8]) -> Dataset {
        // Walk a fixed opening line, recording each position as a triple
        // with the move actually played.
        let mut board = Board::initial();
        let mut triples = Vec::new();
        let mut ply = 1u8;
        while (ply as usize) <= plies.len() {
            let legal: Vec<_> = board.legal_moves().collect();
            let cell = legal[plies[(ply - 1) as usize] as usize % legal.len()];
            triples.push(Triple { board: board.canonical(), target: cell, ply });
            board = board.apply_move(othello_core::Move::Cell(cell)).unwrap();
            ply += 1;
        }
        Dataset::new(EncodingScheme::Pieces, triples)
    }

    #[test]
    fn grid_marginal_matches_overall_accuracy() {
        let p = tiny_predictor(31);
        let data = small_dataset(&[0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2]);
        let grid = accuracy_grid(&p, &data, &[1, 3]).unwrap();
        // Same filter as the grid: plies from 2 up.
        let filtered = Dataset::new(
            data.scheme,
            data.triples.iter().filter(|t| t.ply >= 2).copied().collect(),
        );
        let overall = masked_topk_accuracy(&p, &filtered, &[1, 3]).unwrap();
        assert_eq!(grid.marginal(0), overall[0]);
        assert_eq!(grid.marginal(1), overall[1]);
        let (_, total) = grid.totals(0);
        assert_eq!(total as usize, filtered.len());
    }

    #[test]
    fn top_legal_count_is_always_a_hit() {
        let p = tiny_predictor(32);
        let data = small_dataset(&[1, 0, 2, 1, 0]);
        // k = 60 dominates every legal count.
        let grid = accuracy_grid(&p, &data, &[60]).unwrap();
        for ((_, legal), (count, per_k)) in &grid.cells {
            assert_eq!(per_k[0], *count, "top-{legal} must hit every time");
        }
        assert_eq!(grid.marginal(0), 1.0);
    }

    #[test]
    fn single_example_grid_has_one_cell() {
        let p = tiny_predictor(33);
        let mut data = small_dataset(&[0, 1]);
        data.triples.remove(0); // keep only the ply-2 example
        let grid = accuracy_grid(&p, &data, &[1]).unwrap();
        assert_eq!(grid.cells.len(), 1);
        let acc = grid.marginal(0);
        assert!(acc == 0.0 || acc == 1.0);
        let ((move_number, _), _) = grid.cells.iter().next().unwrap();
        assert_eq!(*move_number, 6);
    }

    #[test]
    fn validity_rate_over_uniform_outputs_matches_direct_computation() {
        // Zeroed network: every output equals 1/60, the argmax tie-break
        // picks output 0 = a1. Validity rate = fraction of boards where a1
        // is legal.
        let spec = othello_nn::NetworkSpec::linear(2, 60);
        let mut params: othello_nn::Parameters<f32> = othello_nn::he_init(&spec, 1);
        for layer in &mut params.layers {
            if let othello_nn::LayerParams::Affine { weight, bias } = layer {
                weight.data_mut().fill(0.0);
                bias.data_mut().fill(0.0);
            }
        }
        let p = PredictorPolicy::new(spec, params, EncodingScheme::Pieces).unwrap();
        let data = small_dataset(&[0, 1, 2, 3, 0, 1, 2, 3]);
        let a1 = "a1".parse::<othello_core::Cell>().unwrap();
        let expected = 100.0
            * data.triples.iter().filter(|t| t.board.legal_moves().contains(a1)).count() as f64
            / data.len() as f64;
        assert_eq!(unmasked_validity_rate(&p, &data).unwrap(), expected);
    }

    #[test]
    fn empty_dataset_is_an_error() {
        let p = tiny_predictor(34);
        let empty = Dataset::new(EncodingScheme::Pieces, Vec::new());
        assert_eq!(unmasked_validity_rate(&p, &empty), Err(Error::EmptyDataset));
        assert_eq!(masked_topk_accuracy(&p, &empty, &[1]).unwrap_err(), Error::EmptyDataset);
    }
}
