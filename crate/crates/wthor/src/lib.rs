//! Bit-exact reader for WThor `.wtb` game databases.
//!
//! A game file is a 16-byte header followed by 68-byte game records. Moves
//! are stored one byte per move, units digit = column and tens digit = row
//! (both 1-based), zero-padded after the final move. Only 8x8 files are
//! accepted; replaying every game against the rules engine is the
//! authoritative validation of the coding.

use std::fmt;
use std::path::{Path, PathBuf};

use othello_core::{Board, Cell, GameOutcome, Move, Player};

pub const HEADER_LEN: usize = 16;
pub const RECORD_LEN: usize = 68;
const MOVES_PER_GAME: usize = 60;

#[derive(Clone, Debug, thiserror::Error, PartialEq)]
pub enum Error {
    #[error("file truncated: expected {expected} bytes, found {actual}")]
    TruncatedFile { expected: usize, actual: usize },
    #[error("unsupported board size {0} (only 8x8 files are handled)")]
    UnsupportedBoardSize(u8),
    #[error("malformed move byte {0}")]
    MalformedMoveByte(u8),
    #[error("illegal recorded move {cell} at ply {ply}")]
    IllegalRecordedMove { ply: usize, cell: Cell },
    #[error("game {game}: {source}")]
    InGame { game: usize, source: Box<Error> },
    #[error("io error on {path}: {message}")]
    Io { path: PathBuf, message: String },
}

/// The 16-byte file header.
///
/// `name_count` mirrors the N2 field shared with the player/tournament name
/// files; it is zero in game databases.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct WthorHeader {
    pub created_century: u8,
    pub created_year: u8,
    pub created_month: u8,
    pub created_day: u8,
    pub record_count: u32,
    pub name_count: u16,
    pub game_year: u16,
    pub board_size: u8,
    pub game_type: u8,
    pub depth: u8,
    pub reserved: u8,
}

impl WthorHeader {
    pub fn parse(bytes: &[u8; HEADER_LEN]) -> WthorHeader {
        WthorHeader {
            created_century: bytes[0],
            created_year: bytes[1],
            created_month: bytes[2],
            created_day: bytes[3],
            record_count: u32::from_le_bytes(bytes[4..8].try_into().unwrap()),
            name_count: u16::from_le_bytes(bytes[8..10].try_into().unwrap()),
            game_year: u16::from_le_bytes(bytes[10..12].try_into().unwrap()),
            board_size: bytes[12],
            game_type: bytes[13],
            depth: bytes[14],
            reserved: bytes[15],
        }
    }

    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[0] = self.created_century;
        out[1] = self.created_year;
        out[2] = self.created_month;
        out[3] = self.created_day;
        out[4..8].copy_from_slice(&self.record_count.to_le_bytes());
        out[8..10].copy_from_slice(&self.name_count.to_le_bytes());
        out[10..12].copy_from_slice(&self.game_year.to_le_bytes());
        out[12] = self.board_size;
        out[13] = self.game_type;
        out[14] = self.depth;
        out[15] = self.reserved;
        out
    }

    pub fn is_8x8(&self) -> bool {
        self.board_size == 0 || self.board_size == 8
    }
}

/// One 68-byte game record.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GameRecord {
    pub tournament_id: u16,
    pub black_player_id: u16,
    pub white_player_id: u16,
    /// Black's disc score with empty squares awarded to the winner.
    pub real_score: u8,
    pub theoretical_score: u8,
    pub moves: [u8; MOVES_PER_GAME],
}

impl GameRecord {
    pub fn parse(bytes: &[u8; RECORD_LEN]) -> GameRecord {
        GameRecord {
            tournament_id: u16::from_le_bytes(bytes[0..2].try_into().unwrap()),
            black_player_id: u16::from_le_bytes(bytes[2..4].try_into().unwrap()),
            white_player_id: u16::from_le_bytes(bytes[4..6].try_into().unwrap()),
            real_score: bytes[6],
            theoretical_score: bytes[7],
            moves: bytes[8..].try_into().unwrap(),
        }
    }

    pub fn to_bytes(&self) -> [u8; RECORD_LEN] {
        let mut out = [0u8; RECORD_LEN];
        out[0..2].copy_from_slice(&self.tournament_id.to_le_bytes());
        out[2..4].copy_from_slice(&self.black_player_id.to_le_bytes());
        out[4..6].copy_from_slice(&self.white_player_id.to_le_bytes());
        out[6] = self.real_score;
        out[7] = self.theoretical_score;
        out[8..].copy_from_slice(&self.moves);
        out
    }
}

/// A decoded move byte: zero is the end-of-moves padding sentinel.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DecodedMove {
    Cell(Cell),
    EndOfMoves,
}

/// Decodes one move byte (units = column 1..8, tens = row 1..8).
pub fn decode_move_byte(b: u8) -> Result<DecodedMove, Error> {
    if b == 0 {
        return Ok(DecodedMove::EndOfMoves);
    }
    let col = b % 10;
    let row = b / 10;
    if !(1..=8).contains(&col) || !(1..=8).contains(&row) {
        return Err(Error::MalformedMoveByte(b));
    }
    Ok(DecodedMove::Cell(Cell::from_coords(row - 1, col - 1).unwrap()))
}

/// Inverse of [`decode_move_byte`] for writing fixtures.
pub fn encode_move_cell(c: Cell) -> u8 {
    (c.row() + 1) * 10 + (c.col() + 1)
}

/// Parses a whole `.wtb` byte buffer.
pub fn parse_wtb(bytes: &[u8]) -> Result<(WthorHeader, Vec<GameRecord>), Error> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::TruncatedFile { expected: HEADER_LEN, actual: bytes.len() });
    }
    let header = WthorHeader::parse(bytes[..HEADER_LEN].try_into().unwrap());
    if !header.is_8x8() {
        return Err(Error::UnsupportedBoardSize(header.board_size));
    }
    let expected = HEADER_LEN + RECORD_LEN * header.record_count as usize;
    if bytes.len() != expected {
        return Err(Error::TruncatedFile { expected, actual: bytes.len() });
    }
    let records = bytes[HEADER_LEN..]
        .chunks_exact(RECORD_LEN)
        .map(|chunk| GameRecord::parse(chunk.try_into().unwrap()))
        .collect();
    Ok((header, records))
}

/// One expert decision: the position, who moved, and where.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ReplayStep {
    /// Position before the move was played.
    pub board: Board,
    pub mover: Player,
    pub cell: Cell,
    /// 1-based index among the game's recorded (non-pass) moves.
    pub ply: u8,
}

/// A validated game: every recorded move replayed legally from the start.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReplayedGame {
    pub steps: Vec<ReplayStep>,
    pub final_board: Board,
}

impl ReplayedGame {
    /// Disc counts on the final board (the position need not be terminal if
    /// the record ended early).
    pub fn outcome(&self) -> GameOutcome {
        GameOutcome {
            black_discs: self.final_board.discs(Player::Black) as u8,
            white_discs: self.final_board.discs(Player::White) as u8,
        }
    }

    /// Black's score under the convention that empty squares are awarded to
    /// the winner (split on a draw), as stored in `real_score`.
    pub fn black_score_empties_to_winner(&self) -> u8 {
        let o = self.outcome();
        let empties = 64 - o.black_discs - o.white_discs;
        match o.black_discs.cmp(&o.white_discs) {
            std::cmp::Ordering::Greater => o.black_discs + empties,
            std::cmp::Ordering::Less => o.black_discs,
            std::cmp::Ordering::Equal => o.black_discs + empties / 2,
        }
    }
}

/// Replays a record from the initial position, interpolating forced passes.
pub fn replay(record: &GameRecord) -> Result<ReplayedGame, Error> {
    let mut board = Board::initial();
    let mut steps = Vec::new();
    for (i, &byte) in record.moves.iter().enumerate() {
        let cell = match decode_move_byte(byte)? {
            DecodedMove::EndOfMoves => break,
            DecodedMove::Cell(c) => c,
        };
        let ply = i + 1;
        // The file stores only placements; passes are implied.
        while board.legal_moves().is_empty() && !board.is_terminal() {
            board = board.apply_move(Move::Pass).expect("pass is legal without moves");
        }
        if !board.legal_moves().contains(cell) {
            return Err(Error::IllegalRecordedMove { ply, cell });
        }
        steps.push(ReplayStep { board, mover: board.to_move(), cell, ply: ply as u8 });
        board = board.apply_move(Move::Cell(cell)).expect("checked legal above");
    }
    Ok(ReplayedGame { steps, final_board: board })
}

/// Corpus-level replay results.
#[derive(Clone, Debug, Default)]
pub struct ReplayReport {
    pub games: usize,
    pub replayed: Vec<ReplayedGame>,
    /// Games excluded because a recorded move was illegal.
    pub failures: Vec<(usize, Error)>,
    /// Games whose `real_score` disagrees with the replayed final board
    /// under the empties-to-winner convention.
    pub score_mismatches: Vec<usize>,
    pub steps: usize,
}

impl ReplayReport {
    pub fn legality_rate(&self) -> f64 {
        if self.games == 0 {
            return 100.0;
        }
        100.0 * self.replayed.len() as f64 / self.games as f64
    }

    pub fn score_consistency_rate(&self) -> f64 {
        if self.replayed.is_empty() {
            return 100.0;
        }
        100.0 * (self.replayed.len() - self.score_mismatches.len()) as f64
            / self.replayed.len() as f64
    }
}

/// Replays every record, excluding (and counting) games that fail.
pub fn replay_all(records: &[GameRecord]) -> ReplayReport {
    let mut report = ReplayReport { games: records.len(), ..Default::default() };
    for (index, record) in records.iter().enumerate() {
        match replay(record) {
            Ok(game) => {
                report.steps += game.steps.len();
                if game.black_score_empties_to_winner() != record.real_score {
                    report.score_mismatches.push(index);
                }
                report.replayed.push(game);
            }
            Err(e) => report.failures.push((index, Error::InGame { game: index, source: Box::new(e) })),
        }
    }
    report
}

/// Reads and parses several `.wtb` files, concatenating their records in
/// filename-sorted order so corpus builds are reproducible.
pub fn load_corpus<P: AsRef<Path>>(paths: &[P]) -> Result<Vec<GameRecord>, Error> {
    let mut sorted: Vec<&Path> = paths.iter().map(AsRef::as_ref).collect();
    sorted.sort();
    let mut records = Vec::new();
    for path in sorted {
        let bytes = std::fs::read(path)
            .map_err(|e| Error::Io { path: path.to_path_buf(), message: e.to_string() })?;
        let (_, mut file_records) = parse_wtb(&bytes)?;
        records.append(&mut file_records);
    }
    Ok(records)
}

/// Lists the `.wtb` files under a directory, sorted by name.
pub fn wtb_files_in(dir: &Path) -> Result<Vec<PathBuf>, Error> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| Error::Io { path: dir.to_path_buf(), message: e.to_string() })?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext.eq_ignore_ascii_case("wtb")))
        .collect();
    files.sort();
    Ok(files)
}

impl fmt::Display for WthorHeader {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "created: {:02}{:02}-{:02}-{:02}",
            self.created_century, self.created_year, self.created_month, self.created_day
        )?;
        writeln!(f, "records: {}", self.record_count)?;
        writeln!(f, "game year: {}", self.game_year)?;
        write!(
            f,
            "board: {}  type: {}  depth: {}",
            if self.is_8x8() { "8x8" } else { "10x10" },
            self.game_type,
            self.depth
        )
    }
}
