//! Dataset files: magic `ODS1`, version, scheme tag, example count, then
//! 17 bytes per triple (two little-endian masks + target index), closed by
//! a CRC-32 of everything before it. Planes are re-derived on load so files
//! stay small; move numbers are not persisted.

use std::io::{BufWriter, Read, Write};
use std::path::Path;

use othello_core::CanonicalBoard;

use crate::{index_cell, target_index, Dataset, EncodingScheme, Error, Triple};

const MAGIC: [u8; 4] = *b"ODS1";
const VERSION: u16 = 1;

/// Plain table-driven CRC-32 (IEEE polynomial).
pub(crate) struct Crc32 {
    table: [u32; 256],
    state: u32,
}

impl Crc32 {
    pub fn new() -> Crc32 {
        let mut table = [0u32; 256];
        for (i, entry) in table.iter_mut().enumerate() {
            let mut crc = i as u32;
            for _ in 0..8 {
                crc = if crc & 1 != 0 { (crc >> 1) ^ 0xedb8_8320 } else { crc >> 1 };
            }
            *entry = crc;
        }
        Crc32 { table, state: 0xffff_ffff }
    }

    pub fn update(&mut self, bytes: &[u8]) {
        for &b in bytes {
            let idx = ((self.state ^ b as u32) & 0xff) as usize;
            self.state = (self.state >> 8) ^ self.table[idx];
        }
    }

    pub fn finish(&self) -> u32 {
        !self.state
    }
}

fn scheme_tag(scheme: EncodingScheme) -> u8 {
    match scheme {
        EncodingScheme::Pieces => 0,
        EncodingScheme::Vmoves => 1,
        EncodingScheme::Ones => 2,
    }
}

fn scheme_from_tag(tag: u8) -> Result<EncodingScheme, Error> {
    match tag {
        0 => Ok(EncodingScheme::Pieces),
        1 => Ok(EncodingScheme::Vmoves),
        2 => Ok(EncodingScheme::Ones),
        other => Err(Error::BadSchemeTag(other)),
    }
}

pub fn save(dataset: &Dataset, path: &Path) -> Result<(), Error> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut crc = Crc32::new();
    let mut emit = |out: &mut BufWriter<std::fs::File>, bytes: &[u8]| -> Result<(), Error> {
        crc.update(bytes);
        out.write_all(bytes).map_err(|e| Error::io(path, e))
    };

    emit(&mut out, &MAGIC)?;
    emit(&mut out, &VERSION.to_le_bytes())?;
    emit(&mut out, &[scheme_tag(dataset.scheme)])?;
    emit(&mut out, &(dataset.triples.len() as u64).to_le_bytes())?;
    for t in &dataset.triples {
        emit(&mut out, &t.board.mover_mask().to_le_bytes())?;
        emit(&mut out, &t.board.opponent_mask().to_le_bytes())?;
        emit(&mut out, &[target_index(t.target)?])?;
    }
    let digest = crc.finish();
    out.write_all(&digest.to_le_bytes()).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn load(path: &Path) -> Result<Dataset, Error> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    if bytes.len() < 4 || bytes[0..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    if bytes.len() < 19 {
        return Err(Error::Truncated);
    }
    let version = u16::from_le_bytes(bytes[4..6].try_into().unwrap());
    if version != VERSION {
        return Err(Error::VersionMismatch { found: version });
    }
    let scheme = scheme_from_tag(bytes[6])?;
    let count = u64::from_le_bytes(bytes[7..15].try_into().unwrap()) as usize;
    let expected = 15 + count * 17 + 4;
    if bytes.len() != expected {
        return Err(Error::Truncated);
    }
    let mut crc = Crc32::new();
    crc.update(&bytes[..expected - 4]);
    let stored = u32::from_le_bytes(bytes[expected - 4..].try_into().unwrap());
    if crc.finish() != stored {
        return Err(Error::ChecksumMismatch);
    }

    let mut triples = Vec::with_capacity(count);
    for (i, chunk) in bytes[15..expected - 4].chunks_exact(17).enumerate() {
        let mover = u64::from_le_bytes(chunk[0..8].try_into().unwrap());
        let opponent = u64::from_le_bytes(chunk[8..16].try_into().unwrap());
        let board = CanonicalBoard::from_masks(mover, opponent)
            .map_err(|_| Error::IllegalTarget { example: i })?;
        let target = index_cell(chunk[16]).ok_or(Error::IllegalTarget { example: i })?;
        // Targets are re-validated against the rules on every load.
        if !board.legal_moves().contains(target) {
            return Err(Error::IllegalTarget { example: i });
        }
        triples.push(Triple { board, target, ply: 0 });
    }
    Ok(Dataset { scheme, triples })
}
