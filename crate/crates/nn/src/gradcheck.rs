//! Finite-difference verification of the analytic gradients.
//!
//! Runs the same kernels in double precision and compares every parameter
//! and input gradient against central differences. This is the independent
//! oracle for the backward pass; keep it free of shortcuts through the
//! analytic path.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::layers::{backward, forward, loss, Mode};
use crate::network::NetworkSpec;
use crate::params::{he_init, LayerGrads, LayerParams, Parameters};
use crate::tensor::Tensor;

/// Central-difference step from the verification protocol.
pub const DEFAULT_STEP: f64 = 1e-5;

#[derive(Clone, Copy, Debug, Default)]
pub struct GradCheckReport {
    /// Largest relative error seen across parameters and inputs.
    pub max_rel_err: f64,
    /// Number of scalar gradients compared.
    pub checked: usize,
}

impl GradCheckReport {
    fn absorb(&mut self, analytic: f64, numeric: f64) {
        let denom = analytic.abs().max(numeric.abs()).max(1e-4);
        self.max_rel_err = self.max_rel_err.max((analytic - numeric).abs() / denom);
        self.checked += 1;
    }
}

/// Checks one network configuration end to end: forward with frozen
/// dropout masks, analytic backward, central differences over every
/// parameter and every input component.
pub fn check_spec(
    spec: &NetworkSpec,
    channels: usize,
    batch: usize,
    l2: f64,
    seed: u64,
    h: f64,
) -> GradCheckReport {
    let classes = spec.validate(channels).expect("gradcheck needs a valid spec");
    let params: Parameters<f64> = he_init(spec, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x00c0_ffee);
    let input = Tensor::from_vec(
        &[batch, channels, 8, 8],
        (0..batch * channels * 64).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect(),
    );
    let targets: Vec<u32> = (0..batch).map(|_| rng.random_range(0..classes as u32)).collect();
    // Reseeding per evaluation freezes the dropout masks across the
    // perturbed forward passes.
    let mask_seed = seed ^ 0xd20f_0u64;

    let eval = |params: &Parameters<f64>, input: &Tensor<f64>| -> f64 {
        let mut mask_rng = ChaCha8Rng::seed_from_u64(mask_seed);
        let pass = forward(spec, params, input, Mode::Train, Some(&mut mask_rng));
        loss(&pass.output, &targets, params, l2)
    };

    let mut mask_rng = ChaCha8Rng::seed_from_u64(mask_seed);
    let pass = forward(spec, &params, &input, Mode::Train, Some(&mut mask_rng));
    let (grads, dinput) = backward(spec, &params, &pass, &targets, l2);

    let mut report = GradCheckReport::default();

    // Parameters, in the same fixed order as the gradient blocks.
    for (li, (p, g)) in params.layers.iter().zip(&grads.layers).enumerate() {
        let pairs: Vec<(&Tensor<f64>, &Tensor<f64>)> = match (p, g) {
            (LayerParams::Affine { weight, bias }, LayerGrads::Affine { weight: gw, bias: gb }) => {
                vec![(weight, gw), (bias, gb)]
            }
            (
                LayerParams::BatchNorm { gamma, beta, .. },
                LayerGrads::BatchNorm { gamma: gg, beta: gb },
            ) => vec![(gamma, gg), (beta, gb)],
            _ => vec![],
        };
        for (ti, (tensor, grad)) in pairs.into_iter().enumerate() {
            for idx in 0..tensor.len() {
                let mut plus = params.clone();
                let mut minus = params.clone();
                nudge(&mut plus, li, ti, idx, h);
                nudge(&mut minus, li, ti, idx, -h);
                let numeric = (eval(&plus, &input) - eval(&minus, &input)) / (2.0 * h);
                report.absorb(grad.data()[idx], numeric);
            }
        }
    }

    // Input gradient.
    for idx in 0..input.len() {
        let mut plus = input.clone();
        let mut minus = input.clone();
        plus.data_mut()[idx] += h;
        minus.data_mut()[idx] -= h;
        let numeric = (eval(&params, &plus) - eval(&params, &minus)) / (2.0 * h);
        report.absorb(dinput.data()[idx], numeric);
    }

    report
}

/// Adds `delta` to one scalar of one parameter tensor, addressed by layer
/// index and tensor position within the layer.
fn nudge(params: &mut Parameters<f64>, layer: usize, tensor: usize, idx: usize, delta: f64) {
    let slot = match &mut params.layers[layer] {
        LayerParams::Affine { weight, bias } => match tensor {
            0 => weight,
            _ => bias,
        },
        LayerParams::BatchNorm { gamma, beta, .. } => match tensor {
            0 => gamma,
            _ => beta,
        },
        LayerParams::None => unreachable!("no tensors to nudge"),
    };
    slot.data_mut()[idx] += delta;
}
