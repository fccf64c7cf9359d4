//! Train/test partitioning.

use std::collections::HashMap;

use othello_core::Symmetry;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::Triple;

/// Whether the split happens before symmetry augmentation (leak-free) or
/// after it (mimicking the simplest possible pipeline).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SplitOrder {
    BeforeAugmentation,
    AfterAugmentation,
}

/// Deterministic split description.
#[derive(Clone, Copy, Debug)]
pub struct SplitSpec {
    /// 0.25 for the asymmetric variants, 0.05 for the symmetric ones.
    pub test_fraction: f64,
    pub seed: u64,
    pub order: SplitOrder,
}

impl SplitSpec {
    pub fn new(test_fraction: f64, seed: u64, order: SplitOrder) -> SplitSpec {
        assert!(test_fraction > 0.0 && test_fraction < 1.0, "fraction must be in (0, 1)");
        SplitSpec { test_fraction, seed, order }
    }

    /// The paper's fraction for a variant: 25% asymmetric, 5% symmetric.
    pub fn paper_fraction(symmetric: bool) -> f64 {
        if symmetric {
            0.05
        } else {
            0.25
        }
    }
}

/// Splits into (train, test).
///
/// `AfterAugmentation` shuffles examples uniformly. `BeforeAugmentation`
/// groups whole symmetry orbits so that no training example can be a
/// symmetry image of a test example; group sizes then bound how exactly the
/// fraction is met (datasets without symmetric duplicates split exactly).
pub fn split(triples: &[Triple], spec: &SplitSpec) -> (Vec<Triple>, Vec<Triple>) {
    let n = triples.len();
    let target = (n as f64 * spec.test_fraction).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut test_flags = vec![false; n];
    match spec.order {
        SplitOrder::AfterAugmentation => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            for &i in order.iter().take(target) {
                test_flags[i] = true;
            }
        }
        SplitOrder::BeforeAugmentation => {
            // Index groups by symmetry-orbit key, in first-occurrence order.
            let mut group_of: HashMap<(u64, u64, u8), usize> = HashMap::new();
            let mut groups: Vec<Vec<usize>> = Vec::new();
            for (i, t) in triples.iter().enumerate() {
                let key = orbit_key(t);
                let g = *group_of.entry(key).or_insert_with(|| {
                    groups.push(Vec::new());
                    groups.len() - 1
                });
                groups[g].push(i);
            }
            let mut order: Vec<usize> = (0..groups.len()).collect();
            order.shuffle(&mut rng);
            let mut assigned = 0usize;
            for &g in &order {
                if assigned >= target {
                    break;
                }
                for &i in &groups[g] {
                    test_flags[i] = true;
                }
                assigned += groups[g].len();
            }
        }
    }

    let mut train = Vec::with_capacity(n - target);
    let mut test = Vec::with_capacity(target);
    for (i, t) in triples.iter().enumerate() {
        if test_flags[i] {
            test.push(*t);
        } else {
            train.push(*t);
        }
    }
    (train, test)
}

/// Canonical representative of the triple's symmetry orbit: the smallest
/// (mover, opponent, target) tuple over the eight images.
fn orbit_key(t: &Triple) -> (u64, u64, u8) {
    Symmetry::ALL
        .iter()
        .map(|&s| {
            let b = t.board.transform(s);
            (b.mover_mask(), b.opponent_mask(), s.apply_cell(t.target).index())
        })
        .min()
        .unwrap()
}
