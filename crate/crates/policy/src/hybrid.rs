//! Per-game-stage policy switching.

use std::sync::Arc;

use othello_core::{Board, Move};

use crate::{Error, Policy, OUTPUTS};

/// Inclusive move-number interval (1-based; a full game has moves 1..=60).
pub type StageInterval = std::ops::RangeInclusive<u32>;

/// The four quarters of a game.
pub fn default_stage_intervals() -> [StageInterval; 4] {
    [1..=15, 16..=30, 31..=45, 46..=60]
}

/// Delegates to one policy per game stage, keyed by move number.
pub struct HybridPolicy {
    stages: Vec<(StageInterval, Arc<dyn Policy>)>,
}

impl HybridPolicy {
    /// Intervals must be disjoint and cover 1..=60 exactly.
    pub fn new(stages: Vec<(StageInterval, Arc<dyn Policy>)>) -> Result<HybridPolicy, Error> {
        let mut covered = [false; 60];
        for (interval, _) in &stages {
            if interval.is_empty() || *interval.start() < 1 || *interval.end() > 60 {
                return Err(Error::BadStages(format!("interval {interval:?} out of range")));
            }
            for n in interval.clone() {
                let slot = &mut covered[(n - 1) as usize];
                if *slot {
                    return Err(Error::BadStages(format!("move {n} covered twice")));
                }
                *slot = true;
            }
        }
        if let Some(hole) = covered.iter().position(|&c| !c) {
            return Err(Error::BadStages(format!("move {} uncovered", hole + 1)));
        }
        Ok(HybridPolicy { stages })
    }

    /// The standard four-stage split over the given policies.
    pub fn four_stage(policies: [Arc<dyn Policy>; 4]) -> HybridPolicy {
        let stages = default_stage_intervals().into_iter().zip(policies).collect();
        HybridPolicy::new(stages).expect("default intervals partition 1..=60")
    }

    /// Picks the move with the stage policy that owns `move_number`.
    pub fn hybrid_choose(&self, board: &Board, move_number: u32) -> Result<Move, Error> {
        let (_, policy) = self
            .stages
            .iter()
            .find(|(interval, _)| interval.contains(&move_number))
            .ok_or(Error::NoStage(move_number))?;
        Ok(policy.choose(board))
    }

    fn stage_for(&self, board: &Board) -> Result<&Arc<dyn Policy>, Error> {
        let move_number = move_number_of(board);
        self.stages
            .iter()
            .find(|(interval, _)| interval.contains(&move_number))
            .map(|(_, p)| p)
            .ok_or(Error::NoStage(move_number))
    }
}

/// 1-based number of the next move: every previous move added one disc to
/// the four the game starts with.
pub fn move_number_of(board: &Board) -> u32 {
    board.occupied().count_ones().saturating_sub(3)
}

impl Policy for HybridPolicy {
    fn name(&self) -> String {
        let parts: Vec<String> =
            self.stages.iter().map(|(i, p)| format!("{}-{}:{}", i.start(), i.end(), p.name())).collect();
        format!("hybrid[{}]", parts.join(";"))
    }

    fn choose(&self, board: &Board) -> Move {
        if board.legal_moves().is_empty() {
            return Move::Pass;
        }
        match self.stage_for(board) {
            Ok(policy) => policy.choose(board),
            Err(_) => Move::Pass, // unreachable for boards from real games
        }
    }

    fn confidences(&self, board: &Board) -> Option<[f32; OUTPUTS]> {
        self.stage_for(board).ok().and_then(|p| p.confidences(board))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use othello_core::{Cell, Player};

    /// Always the lowest-indexed legal move.
    struct First;
    impl Policy for First {
        fn name(&self) -> String {
            "first".into()
        }
        fn choose(&self, board: &Board) -> Move {
            board.legal_moves().next().map_or(Move::Pass, Move::Cell)
        }
    }

    /// Always the highest-indexed legal move.
    struct Last;
    impl Policy for Last {
        fn name(&self) -> String {
            "last".into()
        }
        fn choose(&self, board: &Board) -> Move {
            board.legal_moves().last().map_or(Move::Pass, Move::Cell)
        }
    }

    #[test]
    fn stages_route_by_move_number() {
        let hybrid = HybridPolicy::four_stage([
            Arc::new(First),
            Arc::new(Last),
            Arc::new(First),
            Arc::new(Last),
        ]);
        let board = Board::initial();
        // Move 7 belongs to stage one, move 46 to stage four.
        assert_eq!(hybrid.hybrid_choose(&board, 7).unwrap(), First.choose(&board));
        assert_eq!(hybrid.hybrid_choose(&board, 46).unwrap(), Last.choose(&board));
        assert_eq!(hybrid.hybrid_choose(&board, 16).unwrap(), Last.choose(&board));
    }

    #[test]
    fn move_number_comes_from_disc_count() {
        let board = Board::initial();
        assert_eq!(move_number_of(&board), 1);
        let after = board.apply_move(Move::Cell("f5".parse::<Cell>().unwrap())).unwrap();
        assert_eq!(move_number_of(&after), 2);
    }

    #[test]
    fn uniform_hybrid_equals_its_policy() {
        let hybrid = HybridPolicy::four_stage([
            Arc::new(Last),
            Arc::new(Last),
            Arc::new(Last),
            Arc::new(Last),
        ]);
        let mut board = Board::initial();
        for _ in 0..30 {
            if board.is_terminal() {
                break;
            }
            let expected = Last.choose(&board);
            assert_eq!(hybrid.choose(&board), expected);
            let mv = if board.legal_moves().is_empty() { Move::Pass } else { expected };
            board = board.apply_move(mv).unwrap();
        }
    }

    #[test]
    fn bad_stage_sets_are_rejected() {
        let overlapping = vec![
            (1..=30, Arc::new(First) as Arc<dyn Policy>),
            (30..=60, Arc::new(Last) as Arc<dyn Policy>),
        ];
        assert!(matches!(HybridPolicy::new(overlapping), Err(Error::BadStages(_))));
        let hole = vec![
            (1..=20, Arc::new(First) as Arc<dyn Policy>),
            (22..=60, Arc::new(Last) as Arc<dyn Policy>),
        ];
        assert!(matches!(HybridPolicy::new(hole), Err(Error::BadStages(_))));
        let out_of_range = vec![(0..=60, Arc::new(First) as Arc<dyn Policy>)];
        assert!(matches!(HybridPolicy::new(out_of_range), Err(Error::BadStages(_))));
    }

    #[test]
    fn no_stage_error_reports_the_move_number() {
        let hybrid = HybridPolicy::four_stage([
            Arc::new(First),
            Arc::new(First),
            Arc::new(First),
            Arc::new(First),
        ]);
        assert_eq!(
            hybrid.hybrid_choose(&Board::initial(), 61).unwrap_err(),
            Error::NoStage(61)
        );
        // Terminal-ish boards still answer Pass through the trait.
        let full = Board::from_masks(u64::MAX, 0, Player::Black).unwrap();
        assert_eq!(hybrid.choose(&full), Move::Pass);
    }
}
