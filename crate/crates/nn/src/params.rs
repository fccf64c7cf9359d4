//! Trainable values and their gradients.

use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

use crate::network::{LayerSpec, NetworkSpec, KERNEL};
use crate::tensor::{Scalar, Tensor};

/// Per-layer parameter block. Running statistics live beside the
/// batch-normalization affine pair so checkpoints capture them.
#[derive(Clone, PartialEq, Debug)]
pub enum LayerParams<S> {
    None,
    Affine { weight: Tensor<S>, bias: Tensor<S> },
    BatchNorm { gamma: Tensor<S>, beta: Tensor<S>, running_mean: Tensor<S>, running_var: Tensor<S> },
}

/// All parameters of a network, aligned with its layer list.
#[derive(Clone, PartialEq, Debug)]
pub struct Parameters<S> {
    pub layers: Vec<LayerParams<S>>,
}

/// Gradient blocks mirror the trainable tensors (running stats have none).
#[derive(Clone, PartialEq, Debug)]
pub enum LayerGrads<S> {
    None,
    Affine { weight: Tensor<S>, bias: Tensor<S> },
    BatchNorm { gamma: Tensor<S>, beta: Tensor<S> },
}

#[derive(Clone, PartialEq, Debug)]
pub struct Gradients<S> {
    pub layers: Vec<LayerGrads<S>>,
}

/// He initialization: zero-mean Gaussians with variance 2 / fan-in for
/// weights, zeros for biases; batch-norm scale starts at one.
pub fn he_init<S: Scalar>(spec: &NetworkSpec, seed: u64) -> Parameters<S> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |shape: &[usize], fan_in: usize| -> Tensor<S> {
        let normal = Normal::new(0.0f64, (2.0 / fan_in as f64).sqrt()).unwrap();
        let data = (0..shape.iter().product::<usize>())
            .map(|_| S::from_f64(normal.sample(&mut rng)).unwrap())
            .collect();
        Tensor::from_vec(shape, data)
    };

    let layers = spec
        .layers
        .iter()
        .map(|layer| match *layer {
            LayerSpec::Conv2d { in_channels, maps } => LayerParams::Affine {
                weight: draw(&[maps, in_channels, KERNEL, KERNEL], in_channels * KERNEL * KERNEL),
                bias: Tensor::zeros(&[maps]),
            },
            LayerSpec::FullyConnected { inputs, outputs } => LayerParams::Affine {
                weight: draw(&[outputs, inputs], inputs),
                bias: Tensor::zeros(&[outputs]),
            },
            LayerSpec::BatchNorm { maps } => LayerParams::BatchNorm {
                gamma: Tensor::filled(&[maps], S::one()),
                beta: Tensor::zeros(&[maps]),
                running_mean: Tensor::zeros(&[maps]),
                running_var: Tensor::filled(&[maps], S::one()),
            },
            _ => LayerParams::None,
        })
        .collect();
    Parameters { layers }
}

impl<S: Scalar> Parameters<S> {
    /// Zero gradient blocks with matching shapes.
    pub fn zero_grads(&self) -> Gradients<S> {
        Gradients {
            layers: self
                .layers
                .iter()
                .map(|p| match p {
                    LayerParams::None => LayerGrads::None,
                    LayerParams::Affine { weight, bias } => LayerGrads::Affine {
                        weight: Tensor::zeros(weight.shape()),
                        bias: Tensor::zeros(bias.shape()),
                    },
                    LayerParams::BatchNorm { gamma, beta, .. } => LayerGrads::BatchNorm {
                        gamma: Tensor::zeros(gamma.shape()),
                        beta: Tensor::zeros(beta.shape()),
                    },
                })
                .collect(),
        }
    }

    /// Sum of squared weights for the L2 penalty. Biases, batch-norm affine
    /// parameters and running statistics are excluded.
    pub fn weight_squared_sum(&self) -> S {
        let mut total = S::zero();
        for p in &self.layers {
            if let LayerParams::Affine { weight, .. } = p {
                for &w in weight.data() {
                    total += w * w;
                }
            }
        }
        total
    }

    /// Visits every trainable tensor in a fixed order (weights before
    /// biases, gamma before beta).
    pub fn visit_trainable_mut(&mut self, mut f: impl FnMut(&mut Tensor<S>)) {
        for p in &mut self.layers {
            match p {
                LayerParams::None => {}
                LayerParams::Affine { weight, bias } => {
                    f(weight);
                    f(bias);
                }
                LayerParams::BatchNorm { gamma, beta, .. } => {
                    f(gamma);
                    f(beta);
                }
            }
        }
    }

    pub fn map_to<T: Scalar>(&self) -> Parameters<T> {
        Parameters {
            layers: self
                .layers
                .iter()
                .map(|p| match p {
                    LayerParams::None => LayerParams::None,
                    LayerParams::Affine { weight, bias } => {
                        LayerParams::Affine { weight: weight.map_to(), bias: bias.map_to() }
                    }
                    LayerParams::BatchNorm { gamma, beta, running_mean, running_var } => {
                        LayerParams::BatchNorm {
                            gamma: gamma.map_to(),
                            beta: beta.map_to(),
                            running_mean: running_mean.map_to(),
                            running_var: running_var.map_to(),
                        }
                    }
                })
                .collect(),
        }
    }
}

impl<S: Scalar> Gradients<S> {
    /// Fixed-order visit matching [`Parameters::visit_trainable_mut`].
    pub fn visit(&self, mut f: impl FnMut(&Tensor<S>)) {
        for g in &self.layers {
            match g {
                LayerGrads::None => {}
                LayerGrads::Affine { weight, bias } => {
                    f(weight);
                    f(bias);
                }
                LayerGrads::BatchNorm { gamma, beta } => {
                    f(gamma);
                    f(beta);
                }
            }
        }
    }
}
