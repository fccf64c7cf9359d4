//! Board-to-plane encodings fed to the networks.

use othello_core::CanonicalBoard;

/// Input encoding: mover and opponent occupancy planes, optionally extended
/// by a legal-move plane (`Vmoves`) or a constant plane (`Ones`).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EncodingScheme {
    Pieces,
    Vmoves,
    Ones,
}

impl EncodingScheme {
    pub const ALL: [EncodingScheme; 3] =
        [EncodingScheme::Pieces, EncodingScheme::Vmoves, EncodingScheme::Ones];

    /// Number of 8x8 input channels.
    #[inline]
    pub const fn channels(self) -> usize {
        match self {
            EncodingScheme::Pieces => 2,
            EncodingScheme::Vmoves | EncodingScheme::Ones => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EncodingScheme::Pieces => "pieces",
            EncodingScheme::Vmoves => "vmoves",
            EncodingScheme::Ones => "ones",
        }
    }

    pub fn from_name(name: &str) -> Option<EncodingScheme> {
        match name {
            "pieces" => Some(EncodingScheme::Pieces),
            "vmoves" => Some(EncodingScheme::Vmoves),
            "ones" => Some(EncodingScheme::Ones),
            _ => None,
        }
    }
}

impl std::fmt::Display for EncodingScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[inline]
fn write_mask_plane(out: &mut [f32], mask: u64) {
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = ((mask >> i) & 1) as f32;
    }
}

/// Writes the binary planes for one board into `out` (channel-major,
/// `channels() * 64` values). Channel 0 is the mover, channel 1 the
/// opponent.
pub fn encode_into(board: &CanonicalBoard, scheme: EncodingScheme, out: &mut [f32]) {
    debug_assert_eq!(out.len(), scheme.channels() * 64);
    write_mask_plane(&mut out[0..64], board.mover_mask());
    write_mask_plane(&mut out[64..128], board.opponent_mask());
    match scheme {
        EncodingScheme::Pieces => {}
        EncodingScheme::Vmoves => write_mask_plane(&mut out[128..192], board.legal_moves().mask()),
        EncodingScheme::Ones => out[128..192].fill(1.0),
    }
}

/// Allocating convenience wrapper around [`encode_into`].
pub fn encode(board: &CanonicalBoard, scheme: EncodingScheme) -> Vec<f32> {
    let mut out = vec![0.0; scheme.channels() * 64];
    encode_into(board, scheme, &mut out);
    out
}
