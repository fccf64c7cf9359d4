//! The eight rotations and reflections of the square board.

use crate::Cell;

/// An element of the board's symmetry group: the identity, three rotations
/// and four reflections (the dihedral group of order 8).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Symmetry {
    Identity,
    /// Quarter turn taking a1 to h1.
    Rotate90,
    Rotate180,
    /// Quarter turn taking a1 to a8.
    Rotate270,
    /// Mirror across the vertical axis (files reversed, a1 to h1).
    FlipHorizontal,
    /// Mirror across the horizontal axis (ranks reversed, a1 to a8).
    FlipVertical,
    /// Mirror across the a1-h8 diagonal.
    FlipDiagonal,
    /// Mirror across the a8-h1 diagonal.
    FlipAntidiagonal,
}

impl Symmetry {
    pub const ALL: [Symmetry; 8] = [
        Symmetry::Identity,
        Symmetry::Rotate90,
        Symmetry::Rotate180,
        Symmetry::Rotate270,
        Symmetry::FlipHorizontal,
        Symmetry::FlipVertical,
        Symmetry::FlipDiagonal,
        Symmetry::FlipAntidiagonal,
    ];

    /// Where a single cell lands under this symmetry.
    #[inline]
    pub fn apply_cell(self, c: Cell) -> Cell {
        let (r, col) = (c.row(), c.col());
        let (nr, nc) = match self {
            Symmetry::Identity => (r, col),
            Symmetry::Rotate90 => (col, 7 - r),
            Symmetry::Rotate180 => (7 - r, 7 - col),
            Symmetry::Rotate270 => (7 - col, r),
            Symmetry::FlipHorizontal => (r, 7 - col),
            Symmetry::FlipVertical => (7 - r, col),
            Symmetry::FlipDiagonal => (col, r),
            Symmetry::FlipAntidiagonal => (7 - col, 7 - r),
        };
        Cell::from_coords(nr, nc).unwrap()
    }

    /// Applies the symmetry to a whole occupancy mask.
    ///
    /// Implemented with closed-form bit permutations; agreement with
    /// [`Symmetry::apply_cell`] bit by bit is covered by tests.
    #[inline]
    pub fn apply_mask(self, mask: u64) -> u64 {
        match self {
            Symmetry::Identity => mask,
            Symmetry::Rotate90 => flip_diagonal(flip_vertical(mask)),
            Symmetry::Rotate180 => mask.reverse_bits(),
            Symmetry::Rotate270 => flip_vertical(flip_diagonal(mask)),
            Symmetry::FlipHorizontal => flip_horizontal(mask),
            Symmetry::FlipVertical => flip_vertical(mask),
            Symmetry::FlipDiagonal => flip_diagonal(mask),
            Symmetry::FlipAntidiagonal => flip_antidiagonal(mask),
        }
    }

    /// The element undoing this one.
    #[inline]
    pub fn inverse(self) -> Symmetry {
        match self {
            Symmetry::Rotate90 => Symmetry::Rotate270,
            Symmetry::Rotate270 => Symmetry::Rotate90,
            other => other, // identity, 180 and the reflections are involutions
        }
    }

    /// The single element acting like `self` followed by `then`.
    pub fn compose(self, then: Symmetry) -> Symmetry {
        // The action on b1 and a2 distinguishes all eight elements, so a
        // lookup over ALL is enough.
        let probes = [Cell::from_index(1).unwrap(), Cell::from_index(8).unwrap()];
        let images = probes.map(|c| then.apply_cell(self.apply_cell(c)));
        for s in Symmetry::ALL {
            if probes.map(|c| s.apply_cell(c)) == images {
                return s;
            }
        }
        unreachable!("dihedral group is closed under composition");
    }
}

/// Ranks reversed: (r, c) -> (7-r, c).
#[inline]
fn flip_vertical(x: u64) -> u64 {
    x.swap_bytes()
}

/// Files reversed: (r, c) -> (r, 7-c).
#[inline]
fn flip_horizontal(x: u64) -> u64 {
    let x = ((x >> 1) & 0x5555_5555_5555_5555) | ((x & 0x5555_5555_5555_5555) << 1);
    let x = ((x >> 2) & 0x3333_3333_3333_3333) | ((x & 0x3333_3333_3333_3333) << 2);
    ((x >> 4) & 0x0f0f_0f0f_0f0f_0f0f) | ((x & 0x0f0f_0f0f_0f0f_0f0f) << 4)
}

/// Transpose across a1-h8: (r, c) -> (c, r).
#[inline]
fn flip_diagonal(mut x: u64) -> u64 {
    let mut t = 0x0f0f_0f0f_0000_0000 & (x ^ (x << 28));
    x ^= t ^ (t >> 28);
    t = 0x3333_0000_3333_0000 & (x ^ (x << 14));
    x ^= t ^ (t >> 14);
    t = 0x5500_5500_5500_5500 & (x ^ (x << 7));
    x ^= t ^ (t >> 7);
    x
}

/// Mirror across a8-h1: (r, c) -> (7-c, 7-r).
#[inline]
fn flip_antidiagonal(mut x: u64) -> u64 {
    let mut t = x ^ (x << 36);
    x ^= 0xf0f0_f0f0_0f0f_0f0f & (t ^ (x >> 36));
    t = 0xcccc_0000_cccc_0000 & (x ^ (x << 18));
    x ^= t ^ (t >> 18);
    t = 0xaa00_aa00_aa00_aa00 & (x ^ (x << 9));
    x ^= t ^ (t >> 9);
    x
}
