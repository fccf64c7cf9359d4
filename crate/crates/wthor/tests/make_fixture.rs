//! Regenerates `fixtures/synthetic_100.wtb`.
//!
//! Run manually after any deliberate format change:
//! `cargo test -p othello-wthor --test make_fixture -- --ignored`
//!
//! The fixture is 100 seeded random complete games. Tests validate it with
//! the array-based reference engine, never with this generator.

use std::path::Path;

use othello_wthor::{encode_move_cell, GameRecord, WthorHeader};
use othello_core::{Board, Cell, Move};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_f17e;

#[test]
#[ignore = "writes the committed fixture; run explicitly"]
fn write_synthetic_fixture() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut bytes = WthorHeader {
        created_century: 20,
        created_year: 26,
        created_month: 8,
        created_day: 11,
        record_count: 100,
        name_count: 0,
        game_year: 2026,
        board_size: 8,
        game_type: 0,
        depth: 22,
        reserved: 0,
    }
    .to_bytes()
    .to_vec();

    for game in 0..100u16 {
        let mut board = Board::initial();
        let mut moves = [0u8; 60];
        let mut ply = 0usize;
        loop {
            let legal: Vec<Cell> = board.legal_moves().collect();
            if legal.is_empty() {
                if board.is_terminal() {
                    break;
                }
                board = board.apply_move(Move::Pass).unwrap();
                continue;
            }
            let cell = legal[rng.random_range(0..legal.len())];
            moves[ply] = encode_move_cell(cell);
            ply += 1;
            board = board.apply_move(Move::Cell(cell)).unwrap();
        }
        let black = board.discs(othello_core::Player::Black) as u8;
        let white = board.discs(othello_core::Player::White) as u8;
        let empties = 64 - black - white;
        let real_score = match black.cmp(&white) {
            std::cmp::Ordering::Greater => black + empties,
            std::cmp::Ordering::Less => black,
            std::cmp::Ordering::Equal => black + empties / 2,
        };
        let record = GameRecord {
            tournament_id: game / 10,
            black_player_id: game,
            white_player_id: 100 + game,
            real_score,
            theoretical_score: real_score,
            moves,
        };
        bytes.extend_from_slice(&record.to_bytes());
    }

    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic_100.wtb");
    std::fs::create_dir_all(path.parent().unwrap()).unwrap();
    std::fs::write(&path, &bytes).unwrap();
    println!("wrote {} bytes to {}", bytes.len(), path.display());
}
