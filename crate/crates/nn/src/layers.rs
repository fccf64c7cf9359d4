//! Forward and backward kernels plus the pipeline orchestration.
//!
//! Kernels parallelize only over disjoint output regions (examples for
//! activations, feature maps for weight gradients) with fixed-order inner
//! reductions, so results are bit-identical for any thread count and for
//! the sequential fallback.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::network::{LayerSpec, NetworkSpec, BN_EPSILON, KERNEL};
use crate::params::{Gradients, LayerGrads, LayerParams, Parameters};
use crate::tensor::{fmadd, for_each_chunk_mut, lit, map_indexed, Scalar, Tensor};

const TAPS: usize = KERNEL * KERNEL;
const PAD_W: usize = 10; // 8 + one zero cell each side
const PAD_AREA: usize = PAD_W * PAD_W;

/// Batch statistics in training mode vs running statistics at inference.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    Train,
    Infer,
}

/// Per-layer data saved by a training-mode forward pass.
pub enum LayerAux<S> {
    None,
    /// Zero-padded copy of the convolution input, reused by backward.
    Conv { padded: Tensor<S> },
    BatchNorm { mean: Vec<S>, var: Vec<S>, inv_std: Vec<S>, xhat: Tensor<S> },
    /// Mask entries are 0 or 1/keep (inverted dropout).
    Dropout { mask: Tensor<S> },
}

/// Result of a forward pass; training mode keeps every layer input so the
/// backward pass can run.
pub struct ForwardPass<S> {
    pub batch: usize,
    pub output: Tensor<S>,
    inputs: Vec<Tensor<S>>,
    aux: Vec<LayerAux<S>>,
}

impl<S: Scalar> ForwardPass<S> {
    pub fn has_cache(&self) -> bool {
        !self.inputs.is_empty()
    }

    /// Batch-normalization aux blocks, for running-statistics updates.
    pub(crate) fn aux(&self) -> &[LayerAux<S>] {
        &self.aux
    }
}

/// Runs the pipeline. `rng` drives dropout masks and must be provided in
/// training mode when a non-zero dropout layer is present.
pub fn forward<S: Scalar>(
    spec: &NetworkSpec,
    params: &Parameters<S>,
    input: &Tensor<S>,
    mode: Mode,
    mut rng: Option<&mut ChaCha8Rng>,
) -> ForwardPass<S> {
    let batch = input.shape()[0];
    let train = mode == Mode::Train;
    let mut inputs = Vec::new();
    let mut aux = Vec::new();
    let mut current = input.clone();

    for (layer, p) in spec.layers.iter().zip(&params.layers) {
        let mut step_aux = LayerAux::None;
        let next = match (*layer, p) {
            (LayerSpec::Conv2d { in_channels, maps }, LayerParams::Affine { weight, bias }) => {
                let padded = pad_batch(&current, batch, in_channels);
                let out = conv_forward(&padded, batch, in_channels, maps, weight.data(), bias.data());
                if train {
                    step_aux = LayerAux::Conv { padded };
                }
                out
            }
            (LayerSpec::Relu, _) => {
                let mut out = current.clone();
                let chunk = out.len() / batch;
                for_each_chunk_mut(out.data_mut(), chunk, |_, c| {
                    for v in c.iter_mut() {
                        if *v < S::zero() {
                            *v = S::zero();
                        }
                    }
                });
                out
            }
            (LayerSpec::BatchNorm { maps }, LayerParams::BatchNorm { gamma, beta, running_mean, running_var }) => {
                let (out, bn_aux) = batch_norm_forward(
                    &current, batch, maps, gamma.data(), beta.data(),
                    running_mean.data(), running_var.data(), mode,
                );
                if train {
                    step_aux = bn_aux;
                }
                out
            }
            (LayerSpec::Dropout { rate }, _) => {
                if train && rate > 0.0 {
                    let r = rng.as_deref_mut().expect("training a dropout network needs an rng");
                    let keep = 1.0 - rate;
                    let scale = lit::<S>(1.0 / keep);
                    let mask_data: Vec<S> = (0..current.len())
                        .map(|_| if r.random::<f64>() < rate { S::zero() } else { scale })
                        .collect();
                    let mask = Tensor::from_vec(&[current.len()], mask_data);
                    let mut out = current.clone();
                    for (v, &m) in out.data_mut().iter_mut().zip(mask.data()) {
                        *v *= m;
                    }
                    step_aux = LayerAux::Dropout { mask };
                    out
                } else {
                    current.clone()
                }
            }
            (LayerSpec::Flatten, _) => {
                let len = current.len() / batch;
                current.clone().reshaped(&[batch, len])
            }
            (LayerSpec::FullyConnected { inputs: n_in, outputs: n_out }, LayerParams::Affine { weight, bias }) => {
                fc_forward(&current, batch, n_in, n_out, weight.data(), bias.data())
            }
            (LayerSpec::Softmax, _) => softmax_forward(&current, batch),
            (l, _) => panic!("layer {l:?} has mismatched parameters"),
        };
        if train {
            inputs.push(std::mem::replace(&mut current, next));
            aux.push(step_aux);
        } else {
            current = next;
        }
    }

    ForwardPass { batch, output: current, inputs, aux }
}

/// Mean cross-entropy of the targets under the output probabilities, plus
/// the L2 penalty (l2/2 times the squared weights).
pub fn loss<S: Scalar>(
    output: &Tensor<S>,
    targets: &[u32],
    params: &Parameters<S>,
    l2: f64,
) -> S {
    let batch = targets.len();
    let classes = output.len() / batch;
    let floor = lit::<S>(1e-300f64.max(f64::MIN_POSITIVE));
    let mut total = S::zero();
    for (e, &t) in targets.iter().enumerate() {
        let p = output.data()[e * classes + t as usize];
        total -= p.max(floor).ln();
    }
    total / lit::<S>(batch as f64) + lit::<S>(l2 / 2.0) * params.weight_squared_sum()
}

/// Exact gradients of the loss with respect to every parameter and the
/// network input. Requires a training-mode pass.
pub fn backward<S: Scalar>(
    spec: &NetworkSpec,
    params: &Parameters<S>,
    pass: &ForwardPass<S>,
    targets: &[u32],
    l2: f64,
) -> (Gradients<S>, Tensor<S>) {
    assert!(pass.has_cache(), "backward needs a training-mode forward pass");
    assert!(
        matches!(spec.layers.last(), Some(LayerSpec::Softmax)),
        "pipeline must end in softmax for cross-entropy backward"
    );
    let batch = pass.batch;
    let mut grads = params.zero_grads();

    // Softmax plus cross-entropy collapse to (p - onehot) / n.
    let mut grad = pass.output.clone();
    {
        let classes = grad.len() / batch;
        let scale = lit::<S>(1.0 / batch as f64);
        let data = grad.data_mut();
        for (e, &t) in targets.iter().enumerate() {
            data[e * classes + t as usize] -= S::one();
        }
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    for i in (0..spec.layers.len() - 1).rev() {
        let layer = spec.layers[i];
        let input = &pass.inputs[i];
        grad = match (layer, &params.layers[i], &pass.aux[i]) {
            (LayerSpec::Conv2d { in_channels, maps }, LayerParams::Affine { weight, .. }, LayerAux::Conv { padded }) => {
                let (dw, db, dx) = conv_backward(
                    padded, &grad, batch, in_channels, maps, weight.data(),
                );
                grads.layers[i] = LayerGrads::Affine { weight: dw, bias: db };
                dx
            }
            (LayerSpec::Relu, _, _) => {
                let mut dx = grad;
                for (d, &x) in dx.data_mut().iter_mut().zip(input.data()) {
                    if x <= S::zero() {
                        *d = S::zero();
                    }
                }
                dx
            }
            (LayerSpec::BatchNorm { maps }, LayerParams::BatchNorm { gamma, .. }, LayerAux::BatchNorm { inv_std, xhat, .. }) => {
                let (dgamma, dbeta, dx) =
                    batch_norm_backward(&grad, xhat, batch, maps, gamma.data(), inv_std);
                grads.layers[i] = LayerGrads::BatchNorm { gamma: dgamma, beta: dbeta };
                dx
            }
            (LayerSpec::Dropout { .. }, _, LayerAux::Dropout { mask }) => {
                let mut dx = grad;
                for (d, &m) in dx.data_mut().iter_mut().zip(mask.data()) {
                    *d *= m;
                }
                dx
            }
            (LayerSpec::Dropout { .. }, _, LayerAux::None) => grad, // rate 0
            (LayerSpec::Flatten, _, _) => grad.reshaped(input.shape()),
            (LayerSpec::FullyConnected { inputs: n_in, outputs: n_out }, LayerParams::Affine { weight, .. }, _) => {
                let (dw, db, dx) = fc_backward(input, &grad, batch, n_in, n_out, weight.data());
                grads.layers[i] = LayerGrads::Affine { weight: dw, bias: db };
                dx
            }
            (l, _, _) => panic!("layer {l:?} has mismatched parameters or cache"),
        };
    }

    // L2 pulls every weight towards zero; biases and batch-norm affine
    // parameters are exempt.
    if l2 != 0.0 {
        let factor = lit::<S>(l2);
        for (g, p) in grads.layers.iter_mut().zip(&params.layers) {
            if let (LayerGrads::Affine { weight: gw, .. }, LayerParams::Affine { weight: w, .. }) = (g, p) {
                for (gv, &wv) in gw.data_mut().iter_mut().zip(w.data()) {
                    *gv += factor * wv;
                }
            }
        }
    }

    let dinput = grad.reshaped(pass.inputs[0].shape());
    (grads, dinput)
}

/// Folds the batch statistics of one pass into the running estimates.
pub fn update_running_stats<S: Scalar>(
    params: &mut Parameters<S>,
    pass: &ForwardPass<S>,
    momentum: f64,
) {
    let m = lit::<S>(momentum);
    let one_minus = lit::<S>(1.0 - momentum);
    for (p, aux) in params.layers.iter_mut().zip(pass.aux()) {
        if let (LayerParams::BatchNorm { running_mean, running_var, .. }, LayerAux::BatchNorm { mean, var, .. }) = (p, aux) {
            for (r, &b) in running_mean.data_mut().iter_mut().zip(mean) {
                *r = m * *r + one_minus * b;
            }
            for (r, &b) in running_var.data_mut().iter_mut().zip(var) {
                *r = m * *r + one_minus * b;
            }
        }
    }
}

/// Copies [n, c, 8, 8] into [n, c, 10, 10] with a zero border.
fn pad_batch<S: Scalar>(input: &Tensor<S>, batch: usize, channels: usize) -> Tensor<S> {
    let mut padded = Tensor::zeros(&[batch, channels, PAD_W, PAD_W]);
    let src = input.data();
    for_each_chunk_mut(padded.data_mut(), channels * PAD_AREA, |e, dst| {
        let x = &src[e * channels * 64..][..channels * 64];
        for b in 0..channels {
            for r in 0..8 {
                let out_row = &mut dst[b * PAD_AREA + (r + 1) * PAD_W + 1..][..8];
                out_row.copy_from_slice(&x[b * 64 + r * 8..][..8]);
            }
        }
    });
    padded
}

/// 3x3 convolution of a zero-padded batch; shared by the forward pass and,
/// with rotated/transposed weights, by the input-gradient computation.
///
/// Four output maps run together so the input rows are loaded once per
/// group and four independent accumulator chains keep the vector units fed.
fn conv_apply<S: Scalar>(
    padded: &Tensor<S>,
    batch: usize,
    cin: usize,
    cout: usize,
    weight: &[S],
    bias: Option<&[S]>,
) -> Tensor<S> {
    let mut out = Tensor::zeros(&[batch, cout, 8, 8]);
    let src = padded.data();
    let bias_of = |m: usize| bias.map_or(S::zero(), |b| b[m]);
    for_each_chunk_mut(out.data_mut(), cout * 64, |e, dst| {
        let x = &src[e * cin * PAD_AREA..][..cin * PAD_AREA];
        let mut m = 0;
        while m + 4 <= cout {
            let wk: [&[S]; 4] =
                std::array::from_fn(|k| &weight[(m + k) * cin * TAPS..][..cin * TAPS]);
            for r in 0..8 {
                let mut acc = [[S::zero(); 8]; 4];
                for (k, a) in acc.iter_mut().enumerate() {
                    *a = [bias_of(m + k); 8];
                }
                for b in 0..cin {
                    let pb = &x[b * PAD_AREA..][..PAD_AREA];
                    let wkb: [&[S; TAPS]; 4] =
                        std::array::from_fn(|k| wk[k][b * TAPS..][..TAPS].try_into().unwrap());
                    for dr in 0..KERNEL {
                        let row: &[S; PAD_W] =
                            pb[(r + dr) * PAD_W..][..PAD_W].try_into().unwrap();
                        for dc in 0..KERNEL {
                            let t = dr * KERNEL + dc;
                            for (k, a) in acc.iter_mut().enumerate() {
                                let w = wkb[k][t];
                                for c in 0..8 {
                                    a[c] = fmadd(w, row[c + dc], a[c]);
                                }
                            }
                        }
                    }
                }
                for (k, a) in acc.iter().enumerate() {
                    dst[(m + k) * 64 + r * 8..][..8].copy_from_slice(a);
                }
            }
            m += 4;
        }
        while m < cout {
            let wm = &weight[m * cin * TAPS..][..cin * TAPS];
            for r in 0..8 {
                let mut acc = [bias_of(m); 8];
                for b in 0..cin {
                    let wb = &wm[b * TAPS..][..TAPS];
                    let pb = &x[b * PAD_AREA..][..PAD_AREA];
                    for dr in 0..KERNEL {
                        let row: &[S; PAD_W] =
                            pb[(r + dr) * PAD_W..][..PAD_W].try_into().unwrap();
                        for dc in 0..KERNEL {
                            let w = wb[dr * KERNEL + dc];
                            for c in 0..8 {
                                acc[c] = fmadd(w, row[c + dc], acc[c]);
                            }
                        }
                    }
                }
                dst[m * 64 + r * 8..][..8].copy_from_slice(&acc);
            }
            m += 1;
        }
    });
    out
}

fn conv_forward<S: Scalar>(
    padded: &Tensor<S>,
    batch: usize,
    cin: usize,
    cout: usize,
    weight: &[S],
    bias: &[S],
) -> Tensor<S> {
    conv_apply(padded, batch, cin, cout, weight, Some(bias))
}

fn conv_backward<S: Scalar>(
    padded: &Tensor<S>,
    dout: &Tensor<S>,
    batch: usize,
    cin: usize,
    cout: usize,
    weight: &[S],
) -> (Tensor<S>, Tensor<S>, Tensor<S>) {
    let dy = dout.data();
    let x = padded.data();

    // Input gradient: a convolution of the padded output gradient with the
    // transposed, 180-degree-rotated kernels. This reuses the fast forward
    // kernel with channels and maps swapped.
    let rotated: Tensor<S> = {
        let mut w = Tensor::zeros(&[cin, cout, KERNEL, KERNEL]);
        let dst = w.data_mut();
        for m in 0..cout {
            for b in 0..cin {
                for dr in 0..KERNEL {
                    for dc in 0..KERNEL {
                        dst[(b * cout + m) * TAPS + (KERNEL - 1 - dr) * KERNEL + (KERNEL - 1 - dc)] =
                            weight[(m * cin + b) * TAPS + dr * KERNEL + dc];
                    }
                }
            }
        }
        w
    };
    let dy_padded = pad_batch(dout, batch, cout);
    let dinput = conv_apply(&dy_padded, batch, cout, cin, rotated.data(), None);

    // Weight gradient: one output map per worker; the nine tap accumulators
    // stay vectorized until a final horizontal sum.
    let mut dweight = Tensor::zeros(&[cout, cin, KERNEL, KERNEL]);
    for_each_chunk_mut(dweight.data_mut(), cin * TAPS, |m, dwm| {
        for b in 0..cin {
            let mut acc = [[S::zero(); 8]; TAPS];
            for e in 0..batch {
                let pb = &x[(e * cin + b) * PAD_AREA..][..PAD_AREA];
                let dym = &dy[(e * cout + m) * 64..][..64];
                for r in 0..8 {
                    let dyrow: &[S; 8] = dym[r * 8..][..8].try_into().unwrap();
                    for dr in 0..KERNEL {
                        let xrow: &[S; PAD_W] =
                            pb[(r + dr) * PAD_W..][..PAD_W].try_into().unwrap();
                        for dc in 0..KERNEL {
                            let a = &mut acc[dr * KERNEL + dc];
                            for c in 0..8 {
                                a[c] = fmadd(dyrow[c], xrow[c + dc], a[c]);
                            }
                        }
                    }
                }
            }
            for (t, a) in acc.iter().enumerate() {
                let mut sum = S::zero();
                for &v in a {
                    sum += v;
                }
                dwm[b * TAPS + t] = sum;
            }
        }
    });

    let mut dbias = Tensor::zeros(&[cout]);
    for_each_chunk_mut(dbias.data_mut(), 1, |m, db| {
        let mut sum = S::zero();
        for e in 0..batch {
            for &v in &dy[e * cout * 64 + m * 64..][..64] {
                sum += v;
            }
        }
        db[0] = sum;
    });

    (dweight, dbias, dinput)
}

fn fc_forward<S: Scalar>(
    input: &Tensor<S>,
    batch: usize,
    n_in: usize,
    n_out: usize,
    weight: &[S],
    bias: &[S],
) -> Tensor<S> {
    let mut out = Tensor::zeros(&[batch, n_out]);
    let x = input.data();
    for_each_chunk_mut(out.data_mut(), n_out, |e, dst| {
        let xe = &x[e * n_in..][..n_in];
        for (o, slot) in dst.iter_mut().enumerate() {
            let row = &weight[o * n_in..][..n_in];
            let mut acc = S::zero();
            for (w, v) in row.iter().zip(xe) {
                acc = fmadd(*w, *v, acc);
            }
            *slot = acc + bias[o];
        }
    });
    out
}

fn fc_backward<S: Scalar>(
    input: &Tensor<S>,
    dout: &Tensor<S>,
    batch: usize,
    n_in: usize,
    n_out: usize,
    weight: &[S],
) -> (Tensor<S>, Tensor<S>, Tensor<S>) {
    let x = input.data();
    let dy = dout.data();

    let mut dinput = Tensor::zeros(&[batch, n_in]);
    for_each_chunk_mut(dinput.data_mut(), n_in, |e, dst| {
        let dye = &dy[e * n_out..][..n_out];
        for (o, &g) in dye.iter().enumerate() {
            let row = &weight[o * n_in..][..n_in];
            for (d, &w) in dst.iter_mut().zip(row) {
                *d = fmadd(g, w, *d);
            }
        }
    });

    let mut dweight = Tensor::zeros(&[n_out, n_in]);
    for_each_chunk_mut(dweight.data_mut(), n_in, |o, dwo| {
        for e in 0..batch {
            let g = dy[e * n_out + o];
            let xe = &x[e * n_in..][..n_in];
            for (d, &v) in dwo.iter_mut().zip(xe) {
                *d = fmadd(g, v, *d);
            }
        }
    });

    let mut dbias = Tensor::zeros(&[n_out]);
    for_each_chunk_mut(dbias.data_mut(), 1, |o, db| {
        let mut sum = S::zero();
        for e in 0..batch {
            sum += dy[e * n_out + o];
        }
        db[0] = sum;
    });

    (dweight, dbias, dinput)
}

#[allow(clippy::too_many_arguments)]
fn batch_norm_forward<S: Scalar>(
    input: &Tensor<S>,
    batch: usize,
    maps: usize,
    gamma: &[S],
    beta: &[S],
    running_mean: &[S],
    running_var: &[S],
    mode: Mode,
) -> (Tensor<S>, LayerAux<S>) {
    let x = input.data();
    let count = lit::<S>((batch * 64) as f64);
    let eps = lit::<S>(BN_EPSILON);

    let (mean, var, inv_std): (Vec<S>, Vec<S>, Vec<S>) = match mode {
        Mode::Train => {
            // Per-map statistics over batch and board positions, two-pass.
            let stats = map_indexed(maps, |m| {
                let mut sum = S::zero();
                for e in 0..batch {
                    for &v in &x[(e * maps + m) * 64..][..64] {
                        sum += v;
                    }
                }
                let mean = sum / count;
                let mut sq = S::zero();
                for e in 0..batch {
                    for &v in &x[(e * maps + m) * 64..][..64] {
                        let d = v - mean;
                        sq += d * d;
                    }
                }
                (mean, sq / count)
            });
            let mean: Vec<S> = stats.iter().map(|s| s.0).collect();
            let var: Vec<S> = stats.iter().map(|s| s.1).collect();
            let inv: Vec<S> = var.iter().map(|&v| S::one() / (v + eps).sqrt()).collect();
            (mean, var, inv)
        }
        Mode::Infer => {
            let inv: Vec<S> = running_var.iter().map(|&v| S::one() / (v + eps).sqrt()).collect();
            (running_mean.to_vec(), running_var.to_vec(), inv)
        }
    };

    // Normalized values first; training backward needs them anyway.
    let mut xhat = Tensor::zeros(&[batch, maps, 8, 8]);
    for_each_chunk_mut(xhat.data_mut(), maps * 64, |e, dst| {
        for m in 0..maps {
            let src = &x[(e * maps + m) * 64..][..64];
            for (pos, &v) in src.iter().enumerate() {
                dst[m * 64 + pos] = (v - mean[m]) * inv_std[m];
            }
        }
    });

    let mut out = Tensor::zeros(&[batch, maps, 8, 8]);
    {
        let xh = xhat.data();
        for_each_chunk_mut(out.data_mut(), maps * 64, |e, dst| {
            for m in 0..maps {
                let src = &xh[(e * maps + m) * 64..][..64];
                for (pos, &v) in src.iter().enumerate() {
                    dst[m * 64 + pos] = gamma[m] * v + beta[m];
                }
            }
        });
    }

    let aux = match mode {
        Mode::Train => LayerAux::BatchNorm { mean, var, inv_std, xhat },
        Mode::Infer => LayerAux::None,
    };
    (out, aux)
}

fn batch_norm_backward<S: Scalar>(
    dout: &Tensor<S>,
    xhat: &Tensor<S>,
    batch: usize,
    maps: usize,
    gamma: &[S],
    inv_std: &[S],
) -> (Tensor<S>, Tensor<S>, Tensor<S>) {
    let dy = dout.data();
    let xh = xhat.data();
    let count = lit::<S>((batch * 64) as f64);

    // Per-map reductions first, then an elementwise pass for dx.
    let sums = map_indexed(maps, |m| {
        let mut sum_dy = S::zero();
        let mut sum_dy_xhat = S::zero();
        for e in 0..batch {
            let base = (e * maps + m) * 64;
            for pos in 0..64 {
                let g = dy[base + pos];
                sum_dy += g;
                sum_dy_xhat += g * xh[base + pos];
            }
        }
        (sum_dy, sum_dy_xhat)
    });

    let dgamma = Tensor::from_vec(&[maps], sums.iter().map(|s| s.1).collect());
    let dbeta = Tensor::from_vec(&[maps], sums.iter().map(|s| s.0).collect());

    let mut dinput = Tensor::zeros(&[batch, maps, 8, 8]);
    for_each_chunk_mut(dinput.data_mut(), maps * 64, |e, dst| {
        for m in 0..maps {
            let base = (e * maps + m) * 64;
            let scale = gamma[m] * inv_std[m] / count;
            let (sum_dy, sum_dy_xhat) = sums[m];
            for pos in 0..64 {
                let g = dy[base + pos];
                dst[m * 64 + pos] = scale * (count * g - sum_dy - xh[base + pos] * sum_dy_xhat);
            }
        }
    });

    (dgamma, dbeta, dinput)
}

fn softmax_forward<S: Scalar>(input: &Tensor<S>, batch: usize) -> Tensor<S> {
    let classes = input.len() / batch;
    let mut out = input.clone().reshaped(&[batch, classes]);
    for_each_chunk_mut(out.data_mut(), classes, |_, row| {
        let mut max = row[0];
        for &v in row.iter() {
            if v > max {
                max = v;
            }
        }
        let mut sum = S::zero();
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        for v in row.iter_mut() {
            *v = *v / sum;
        }
    });
    out
}
