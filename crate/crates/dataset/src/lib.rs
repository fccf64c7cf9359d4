//! Expert-move datasets.
//!
//! Builds the four dataset variants from replayed games (raw, deduplicated,
//! and their symmetry-augmented closures), encodes boards into input planes,
//! maps moves onto the 60-way output space, splits train/test and persists
//! everything in a compact binary format.

mod build;
mod encode;
mod index;
mod io;
mod split;

use std::path::Path;

use othello_core::{CanonicalBoard, Cell};

pub use build::{
    augment, bootstrap_resample, build_variant, consistency_upper_bound, dedup, extract,
    DatasetVariant,
};
pub use encode::{encode, encode_into, EncodingScheme};
pub use index::{index_cell, is_center, target_index, OUTPUTS};
pub use split::{split, SplitOrder, SplitSpec};

/// One training decision: a mover-perspective board and the expert's move.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Triple {
    pub board: CanonicalBoard,
    pub target: Cell,
    /// 1-based index among the game's recorded moves; 0 when unknown
    /// (datasets loaded from disk do not keep move numbers).
    pub ply: u8,
}

impl Triple {
    /// Identity for deduplication: move numbers are metadata, not identity.
    #[inline]
    pub fn key(&self) -> (u64, u64, u8) {
        (self.board.mover_mask(), self.board.opponent_mask(), self.target.index())
    }
}

/// A set of triples plus the encoding they are meant to be trained with.
#[derive(Clone, PartialEq, Debug)]
pub struct Dataset {
    pub scheme: EncodingScheme,
    pub triples: Vec<Triple>,
}

impl Dataset {
    pub fn new(scheme: EncodingScheme, triples: Vec<Triple>) -> Dataset {
        Dataset { scheme, triples }
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn save(&self, path: &Path) -> Result<(), Error> {
        io::save(self, path)
    }

    pub fn load(path: &Path) -> Result<Dataset, Error> {
        io::load(path)
    }

    /// Encodes every board into one contiguous plane buffer plus the target
    /// index per example.
    pub fn encode_all(&self) -> (Vec<f32>, Vec<u32>) {
        let stride = self.scheme.channels() * 64;
        let mut planes = vec![0.0f32; self.triples.len() * stride];
        let scheme = self.scheme;
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            planes
                .par_chunks_mut(stride)
                .zip(self.triples.par_iter())
                .for_each(|(out, t)| encode_into(&t.board, scheme, out));
        }
        #[cfg(not(feature = "parallel"))]
        for (out, t) in planes.chunks_mut(stride).zip(self.triples.iter()) {
            encode_into(&t.board, scheme, out);
        }
        let targets = self
            .triples
            .iter()
            .map(|t| target_index(t.target).expect("dataset targets are never center cells") as u32)
            .collect();
        (planes, targets)
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum Error {
    #[error("cell {0} is a center cell and has no output index")]
    CenterCell(Cell),
    #[error("not a dataset file (bad magic)")]
    BadMagic,
    #[error("unsupported dataset version {found}")]
    VersionMismatch { found: u16 },
    #[error("dataset file is corrupt (checksum mismatch)")]
    ChecksumMismatch,
    #[error("dataset file is truncated")]
    Truncated,
    #[error("unknown encoding tag {0}")]
    BadSchemeTag(u8),
    #[error("example {example} has an illegal target for its board")]
    IllegalTarget { example: usize },
    #[error("io error on {path}: {message}")]
    Io { path: std::path::PathBuf, message: String },
}

impl Error {
    fn io(path: &Path, e: std::io::Error) -> Error {
        Error::Io { path: path.to_path_buf(), message: e.to_string() }
    }
}
