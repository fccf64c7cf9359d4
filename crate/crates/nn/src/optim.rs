//! Classical-momentum SGD and the halving learning-rate schedule.

use crate::params::{Gradients, LayerGrads, LayerParams, Parameters};
use crate::tensor::{lit, Scalar, Tensor};

/// Training hyperparameters. Defaults follow the reference regime: lr 0.1
/// halved twice per epoch, momentum 0.95, L2 5e-4, batches of 256.
#[derive(Clone, Copy, Debug)]
pub struct TrainConfig {
    pub base_lr: f64,
    pub momentum: f64,
    pub l2: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub halvings_per_epoch: u32,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> TrainConfig {
        TrainConfig {
            base_lr: 0.1,
            momentum: 0.95,
            l2: 5e-4,
            batch_size: 256,
            epochs: 24,
            halvings_per_epoch: 2,
            seed: 0,
        }
    }
}

/// Learning rate at a global step: the base rate halved once per completed
/// fraction `1 / halvings_per_epoch` of an epoch, monotonically across the
/// whole run.
pub fn lr_at(step: usize, steps_per_epoch: usize, config: &TrainConfig) -> f64 {
    assert!(steps_per_epoch > 0);
    let halvings = (config.halvings_per_epoch as u64 * step as u64) / steps_per_epoch as u64;
    config.base_lr * 0.5f64.powi(halvings as i32)
}

/// One velocity tensor per trainable tensor, all starting at zero.
#[derive(Clone, Debug)]
pub struct OptimizerState<S> {
    velocities: Vec<Tensor<S>>,
}

impl<S: Scalar> OptimizerState<S> {
    pub fn new(params: &Parameters<S>) -> OptimizerState<S> {
        let mut velocities = Vec::new();
        let mut snapshot = params.clone();
        snapshot.visit_trainable_mut(|t| velocities.push(Tensor::zeros(t.shape())));
        OptimizerState { velocities }
    }
}

/// Classical momentum: v <- momentum * v - lr * g; p <- p + v.
pub fn sgd_step<S: Scalar>(
    params: &mut Parameters<S>,
    grads: &Gradients<S>,
    state: &mut OptimizerState<S>,
    lr: f64,
    momentum: f64,
) {
    let lr = lit::<S>(lr);
    let mu = lit::<S>(momentum);
    let mut grad_tensors: Vec<&Tensor<S>> = Vec::with_capacity(state.velocities.len());
    for g in &grads.layers {
        match g {
            LayerGrads::None => {}
            LayerGrads::Affine { weight, bias } => {
                grad_tensors.push(weight);
                grad_tensors.push(bias);
            }
            LayerGrads::BatchNorm { gamma, beta } => {
                grad_tensors.push(gamma);
                grad_tensors.push(beta);
            }
        }
    }
    let mut slot = 0usize;
    params.visit_trainable_mut(|p| {
        let v = &mut state.velocities[slot];
        let g = grad_tensors[slot];
        for ((vv, pv), &gv) in v.data_mut().iter_mut().zip(p.data_mut()).zip(g.data()) {
            *vv = mu * *vv - lr * gv;
            *pv += *vv;
        }
        slot += 1;
    });
    assert_eq!(slot, grad_tensors.len(), "gradient blocks must mirror parameters");
}

/// Sanity guard: velocity shapes must mirror the parameters they update.
pub fn shapes_match<S: Scalar>(params: &Parameters<S>, state: &OptimizerState<S>) -> bool {
    let mut shapes = Vec::new();
    let mut snapshot = params.clone();
    snapshot.visit_trainable_mut(|t| shapes.push(t.shape().to_vec()));
    shapes.len() == state.velocities.len()
        && shapes.iter().zip(&state.velocities).all(|(s, v)| s.as_slice() == v.shape())
}
