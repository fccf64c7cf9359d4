//! Bootstrap-aggregated predictors.

use othello_core::{Board, Move};

use crate::{choose_from_confidences, Error, Policy, PredictorPolicy, OUTPUTS};

/// An ensemble of predictors over one architecture and encoding; the move
/// comes from the arithmetic mean of the members' output distributions.
pub struct BaggedPolicy {
    members: Vec<PredictorPolicy>,
}

impl BaggedPolicy {
    pub fn new(members: Vec<PredictorPolicy>) -> Result<BaggedPolicy, Error> {
        let first = members.first().ok_or(Error::EmptyBag)?;
        if members.iter().any(|m| m.spec() != first.spec() || m.scheme() != first.scheme()) {
            return Err(Error::MixedBagMembers);
        }
        Ok(BaggedPolicy { members })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Mean of the members' softmax outputs.
    pub fn bagged_confidences(&self, board: &Board) -> [f32; OUTPUTS] {
        self.bagged_batch(std::slice::from_ref(board)).pop().unwrap()
    }

    fn bagged_batch(&self, boards: &[Board]) -> Vec<[f32; OUTPUTS]> {
        let mut sums = vec![[0.0f32; OUTPUTS]; boards.len()];
        for member in &self.members {
            for (sum, d) in sums.iter_mut().zip(member.predict_batch(boards)) {
                for (s, v) in sum.iter_mut().zip(d) {
                    *s += v;
                }
            }
        }
        let scale = 1.0 / self.members.len() as f32;
        for sum in &mut sums {
            for s in sum.iter_mut() {
                *s *= scale;
            }
        }
        sums
    }
}

impl Policy for BaggedPolicy {
    fn name(&self) -> String {
        format!("bag[{} x {}]", self.members.len(), self.members[0].name())
    }

    fn choose(&self, board: &Board) -> Move {
        choose_from_confidences(board, &self.bagged_confidences(board))
    }

    fn confidences(&self, board: &Board) -> Option<[f32; OUTPUTS]> {
        Some(self.bagged_confidences(board))
    }

    fn confidences_batch(&self, boards: &[Board]) -> Option<Vec<[f32; OUTPUTS]>> {
        Some(self.bagged_batch(boards))
    }
}
