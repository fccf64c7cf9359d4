//! Raw-output accuracy (no legality masking).

use crate::layers::{forward, Mode};
use crate::network::NetworkSpec;
use crate::params::Parameters;
use crate::train::Examples;

const EVAL_BATCH: usize = 256;

/// Fraction of examples whose target is among the `k` largest outputs,
/// breaking ties in favor of lower indices. Legality is ignored here; the
/// masked variant lives with the policies.
pub fn evaluate_topk(
    spec: &NetworkSpec,
    params: &Parameters<f32>,
    examples: &Examples,
    k: usize,
) -> f64 {
    assert!(k >= 1);
    if examples.is_empty() {
        return 0.0;
    }
    let mut hits = 0usize;
    let mut start = 0usize;
    while start < examples.len() {
        let end = (start + EVAL_BATCH).min(examples.len());
        let (input, targets) = examples.slice_range(start, end);
        let pass = forward(spec, params, &input, Mode::Infer, None);
        let classes = examples.classes;
        for (row, &target) in pass.output.data().chunks(classes).zip(targets) {
            if rank_of(row, target as usize) < k {
                hits += 1;
            }
        }
        start = end;
    }
    hits as f64 / examples.len() as f64
}

/// Position of `target` in the descending output order; equal outputs at a
/// lower index rank ahead.
#[inline]
pub(crate) fn rank_of(outputs: &[f32], target: usize) -> usize {
    let t = outputs[target];
    let mut rank = 0usize;
    for (j, &v) in outputs.iter().enumerate() {
        if v > t || (v == t && j < target) {
            rank += 1;
        }
    }
    rank
}
