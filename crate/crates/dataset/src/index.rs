//! The 60-way output index: every non-center cell gets one slot.

use othello_core::Cell;

use crate::Error;

/// Number of network outputs; the four center cells are occupied from the
/// start and never playable.
pub const OUTPUTS: usize = 60;

const CENTER: [u8; 4] = [27, 28, 35, 36]; // d4, e4, d5, e5

/// Maps a cell to its output index (row-major order, center cells skipped).
#[inline]
pub fn target_index(c: Cell) -> Result<u8, Error> {
    let i = c.index();
    match i {
        27 | 28 | 35 | 36 => Err(Error::CenterCell(c)),
        0..=26 => Ok(i),
        29..=34 => Ok(i - 2),
        _ => Ok(i - 4),
    }
}

/// Inverse of [`target_index`].
#[inline]
pub fn index_cell(index: u8) -> Option<Cell> {
    if index as usize >= OUTPUTS {
        return None;
    }
    let i = match index {
        0..=26 => index,
        27..=32 => index + 2,
        _ => index + 4,
    };
    Cell::from_index(i)
}

/// True for d4, e4, d5, e5.
#[inline]
pub fn is_center(c: Cell) -> bool {
    CENTER.contains(&c.index())
}
