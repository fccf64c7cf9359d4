//! Triple extraction, deduplication, symmetry augmentation and the
//! perfect-classifier bound.

use std::collections::HashSet;

use othello_core::Symmetry;
use othello_wthor::ReplayedGame;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::Triple;

/// The four dataset variants.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DatasetVariant {
    Original,
    Unique,
    OriginalS,
    UniqueS,
}

impl DatasetVariant {
    pub const ALL: [DatasetVariant; 4] = [
        DatasetVariant::Original,
        DatasetVariant::Unique,
        DatasetVariant::OriginalS,
        DatasetVariant::UniqueS,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DatasetVariant::Original => "original",
            DatasetVariant::Unique => "unique",
            DatasetVariant::OriginalS => "original-s",
            DatasetVariant::UniqueS => "unique-s",
        }
    }

    pub fn from_name(name: &str) -> Option<DatasetVariant> {
        match name {
            "original" => Some(DatasetVariant::Original),
            "unique" => Some(DatasetVariant::Unique),
            "original-s" => Some(DatasetVariant::OriginalS),
            "unique-s" => Some(DatasetVariant::UniqueS),
            _ => None,
        }
    }

    pub const fn is_symmetric(self) -> bool {
        matches!(self, DatasetVariant::OriginalS | DatasetVariant::UniqueS)
    }

    pub const fn is_deduped(self) -> bool {
        matches!(self, DatasetVariant::Unique | DatasetVariant::UniqueS)
    }
}

fn extract_game(game: &ReplayedGame) -> Vec<Triple> {
    game.steps
        .iter()
        .map(|step| Triple { board: step.board.canonical(), target: step.cell, ply: step.ply })
        .collect()
}

/// One triple per recorded decision, in game order. Passes contribute
/// nothing: there is no pass output among the 60 classes.
pub fn extract(games: &[ReplayedGame]) -> Vec<Triple> {
    #[cfg(feature = "parallel")]
    let per_game: Vec<Vec<Triple>> = games.par_iter().map(extract_game).collect();
    #[cfg(not(feature = "parallel"))]
    let per_game: Vec<Vec<Triple>> = games.iter().map(extract_game).collect();
    per_game.concat()
}

/// Removes exact (board, move) duplicates, keeping first occurrences in
/// order. Conflicting moves for the same board all stay.
pub fn dedup(triples: &[Triple]) -> Vec<Triple> {
    let mut seen = HashSet::with_capacity(triples.len());
    triples.iter().filter(|t| seen.insert(t.key())).copied().collect()
}

/// Expands every triple to its eight symmetry images (identity first).
/// `dedup_after` additionally removes image collisions, as the Unique-S
/// variant requires.
pub fn augment(triples: &[Triple], dedup_after: bool) -> Vec<Triple> {
    let expand = |t: &Triple| {
        Symmetry::ALL.map(|s| Triple {
            board: t.board.transform(s),
            target: s.apply_cell(t.target),
            ply: t.ply,
        })
    };
    #[cfg(feature = "parallel")]
    let expanded: Vec<Triple> = triples.par_iter().flat_map_iter(|t| expand(t)).collect();
    #[cfg(not(feature = "parallel"))]
    let expanded: Vec<Triple> = triples.iter().flat_map(|t| expand(t)).collect();
    if dedup_after {
        dedup(&expanded)
    } else {
        expanded
    }
}

/// Builds one of the four variants from replayed games.
pub fn build_variant(games: &[ReplayedGame], variant: DatasetVariant) -> Vec<Triple> {
    let mut triples = extract(games);
    if variant.is_deduped() {
        triples = dedup(&triples);
    }
    if variant.is_symmetric() {
        triples = augment(&triples, variant.is_deduped());
    }
    triples
}

/// Best possible accuracy (percent) of any deterministic classifier:
/// boards with conflicting moves can only ever have their most common move
/// predicted.
pub fn consistency_upper_bound(triples: &[Triple]) -> f64 {
    if triples.is_empty() {
        return 100.0;
    }
    let mut keys: Vec<(u64, u64, u8)> = triples.iter().map(Triple::key).collect();
    #[cfg(feature = "parallel")]
    keys.par_sort_unstable();
    #[cfg(not(feature = "parallel"))]
    keys.sort_unstable();

    let mut correct = 0u64;
    let mut i = 0;
    while i < keys.len() {
        let board = (keys[i].0, keys[i].1);
        let mut best = 0u64;
        while i < keys.len() && (keys[i].0, keys[i].1) == board {
            let target = keys[i].2;
            let mut run = 0u64;
            while i < keys.len() && (keys[i].0, keys[i].1) == board && keys[i].2 == target {
                run += 1;
                i += 1;
            }
            best = best.max(run);
        }
        correct += best;
    }
    100.0 * correct as f64 / keys.len() as f64
}

/// Seeded bootstrap resample (same size, drawn with replacement) for
/// training bagged ensembles.
pub fn bootstrap_resample(triples: &[Triple], seed: u64) -> Vec<Triple> {
    use rand::prelude::*;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..triples.len()).map(|_| triples[rng.random_range(0..triples.len())]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use othello_core::{Board, CanonicalBoard, Cell};

    fn cell(name: &str) -> Cell {
        name.parse().unwrap()
    }

    fn triple(mover: u64, opponent: u64, target: &str) -> Triple {
        Triple {
            board: CanonicalBoard::from_masks(mover, opponent).unwrap(),
            target: cell(target),
            ply: 1,
        }
    }

    #[test]
    fn dedup_keeps_conflicts() {
        let b = Board::initial().canonical();
        let a = Triple { board: b, target: cell("f5"), ply: 1 };
        let conflicting = Triple { board: b, target: cell("d3"), ply: 1 };
        let out = dedup(&[a, a, conflicting]);
        assert_eq!(out, vec![a, conflicting]);
        // No duplicates: unchanged.
        assert_eq!(dedup(&[a, conflicting]), vec![a, conflicting]);
    }

    #[test]
    fn augment_multiplies_by_eight() {
        let t = triple(1 << 9, 1 << 18, "d3");
        let out = augment(&[t], false);
        assert_eq!(out.len(), 8);
        assert_eq!(out[0], t, "identity image comes first");
    }

    #[test]
    fn symmetric_triple_collapses_under_dedup() {
        // Mover a1, opponent b2, move c3: the whole triple lies on the a1-h8
        // diagonal, so the diagonal flip maps it to itself.
        let t = triple(1, 1 << 9, "c3");
        let out = augment(&[t], true);
        assert!(out.len() < 8, "expected symmetry collisions, got {}", out.len());
        assert_eq!(out.len(), 4);
    }

    #[test]
    fn bound_of_conflict_free_data_is_hundred() {
        let a = triple(1, 1 << 9, "c3");
        let b = triple(1 << 7, 1 << 14, "f3");
        assert_eq!(consistency_upper_bound(&[a, b]), 100.0);
        assert_eq!(consistency_upper_bound(&[]), 100.0);
    }

    #[test]
    fn bound_counts_majority_targets() {
        let board = Board::initial().canonical();
        let a = Triple { board, target: cell("f5"), ply: 1 };
        let b = Triple { board, target: cell("d3"), ply: 1 };
        // Two f5 votes, one d3 vote: best classifier gets 2 of 3.
        let bound = consistency_upper_bound(&[a, a, b]);
        assert!((bound - 200.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn bootstrap_is_seeded_and_same_size() {
        let pool: Vec<Triple> =
            (0..16).map(|i| triple(1 << i, 1 << (i + 20), "c3")).collect();
        assert_eq!(bootstrap_resample(&pool, 7), bootstrap_resample(&pool, 7));
        assert_eq!(bootstrap_resample(&pool, 7).len(), 16);
        assert_ne!(bootstrap_resample(&pool, 7), bootstrap_resample(&pool, 8));
    }
}
