//! The training loop.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::layers::{backward, forward, loss, update_running_stats, Mode};
use crate::network::{LayerSpec, NetworkSpec, BN_RUNNING_MOMENTUM};
use crate::optim::{lr_at, sgd_step, OptimizerState, TrainConfig};
use crate::params::{he_init, Parameters};
use crate::tensor::Tensor;
use crate::{evaluate_topk, Error};

/// Encoded training data: `planes` is example-major, `channels * 64` values
/// per example.
#[derive(Clone, Debug)]
pub struct Examples {
    pub channels: usize,
    pub classes: usize,
    pub planes: Vec<f32>,
    pub targets: Vec<u32>,
}

impl Examples {
    pub fn new(channels: usize, classes: usize, planes: Vec<f32>, targets: Vec<u32>) -> Examples {
        assert_eq!(planes.len(), targets.len() * channels * 64, "plane buffer size mismatch");
        Examples { channels, classes, planes, targets }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    #[inline]
    pub fn stride(&self) -> usize {
        self.channels * 64
    }

    /// Gathers the given examples into one input tensor plus target list.
    pub fn gather(&self, indices: &[usize]) -> (Tensor<f32>, Vec<u32>) {
        let stride = self.stride();
        let mut data = Vec::with_capacity(indices.len() * stride);
        let mut targets = Vec::with_capacity(indices.len());
        for &i in indices {
            data.extend_from_slice(&self.planes[i * stride..(i + 1) * stride]);
            targets.push(self.targets[i]);
        }
        (Tensor::from_vec(&[indices.len(), self.channels, 8, 8], data), targets)
    }

    /// Borrowing view of a contiguous range, for sequential evaluation.
    pub fn slice_range(&self, start: usize, end: usize) -> (Tensor<f32>, &[u32]) {
        let stride = self.stride();
        let data = self.planes[start * stride..end * stride].to_vec();
        (
            Tensor::from_vec(&[end - start, self.channels, 8, 8], data),
            &self.targets[start..end],
        )
    }
}

/// One line per epoch: `epoch  lr  train_loss  test_top1`.
#[derive(Clone, Debug, PartialEq)]
pub struct EpochLog {
    pub epoch: usize,
    pub lr: f64,
    pub train_loss: f64,
    pub test_top1: Option<f64>,
}

#[derive(Clone, Debug, Default)]
pub struct TrainLog {
    pub entries: Vec<EpochLog>,
    /// Mean loss of every batch in run order (first epoch first).
    pub batch_losses: Vec<f64>,
}

impl TrainLog {
    /// Tab-separated log with a header naming the update rule, since the
    /// momentum variant is otherwise invisible in checkpoints.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("# sgd classical-momentum\n");
        out.push_str("# epoch\tlr\ttrain_loss\ttest_top1\n");
        for e in &self.entries {
            let top1 = e.test_top1.map_or("-".to_string(), |v| format!("{v:.6}"));
            out.push_str(&format!("{}\t{}\t{:.6}\t{}\n", e.epoch, e.lr, e.train_loss, top1));
        }
        out
    }
}

/// Trains from a fresh He initialization. Shuffling, initialization and
/// dropout all derive from `config.seed`, and every reduction has a fixed
/// order, so results are bit-identical across runs and thread counts.
pub fn train(
    spec: &NetworkSpec,
    examples: &Examples,
    eval: Option<&Examples>,
    config: &TrainConfig,
) -> Result<(Parameters<f32>, TrainLog), Error> {
    if examples.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let classes = spec.validate(examples.channels)?;
    if classes != examples.classes {
        return Err(Error::BadSpec(format!(
            "network has {classes} outputs but the data has {} classes",
            examples.classes
        )));
    }

    let mut params: Parameters<f32> = he_init(spec, config.seed);
    let mut state = OptimizerState::new(&params);
    // Separate stream for shuffling and dropout; initialization already
    // consumed the raw seed.
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x9e37_79b9_7f4a_7c15);
    let has_dropout = spec
        .layers
        .iter()
        .any(|l| matches!(l, LayerSpec::Dropout { rate } if *rate > 0.0));

    let n = examples.len();
    let steps_per_epoch = n.div_ceil(config.batch_size);
    let mut log = TrainLog::default();
    let mut indices: Vec<usize> = (0..n).collect();
    let mut step = 0usize;

    for epoch in 1..=config.epochs {
        indices.shuffle(&mut rng);
        let mut epoch_loss = 0.0f64;
        let mut last_lr = config.base_lr;
        for batch_indices in indices.chunks(config.batch_size) {
            let (input, targets) = examples.gather(batch_indices);
            let pass = forward(
                spec,
                &params,
                &input,
                Mode::Train,
                if has_dropout { Some(&mut rng) } else { None },
            );
            let batch_loss = loss(&pass.output, &targets, &params, config.l2) as f64;
            epoch_loss += batch_loss * batch_indices.len() as f64;
            log.batch_losses.push(batch_loss);

            let (grads, _) = backward(spec, &params, &pass, &targets, config.l2);
            last_lr = lr_at(step, steps_per_epoch, config);
            sgd_step(&mut params, &grads, &mut state, last_lr, config.momentum);
            update_running_stats(&mut params, &pass, BN_RUNNING_MOMENTUM);
            step += 1;
        }

        let test_top1 = eval.map(|set| evaluate_topk(spec, &params, set, 1));
        log.entries.push(EpochLog {
            epoch,
            lr: last_lr,
            train_loss: epoch_loss / n as f64,
            test_top1,
        });
    }

    Ok((params, log))
}
