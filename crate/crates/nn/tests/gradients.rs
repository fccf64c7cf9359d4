//! Central finite differences vs analytic backprop, in double precision.
//!
//! Every layer type gets its own family of randomized small
//! configurations; each run compares every parameter gradient and every
//! input gradient.

use othello_nn::gradcheck::{check_spec, DEFAULT_STEP};
use othello_nn::{LayerSpec, NetworkSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOLERANCE: f64 = 1e-4;
const CONFIGS_PER_FAMILY: usize = 20;

struct Dims {
    channels: usize,
    batch: usize,
    maps: usize,
    hidden: usize,
    classes: usize,
    rate: f64,
    l2: f64,
}

fn random_dims(rng: &mut ChaCha8Rng) -> Dims {
    Dims {
        channels: rng.random_range(1..=3),
        batch: rng.random_range(1..=3),
        maps: rng.random_range(1..=3),
        hidden: rng.random_range(3..=8),
        classes: rng.random_range(3..=6),
        rate: 0.3 + rng.random::<f64>() * 0.3,
        l2: 0.05 + rng.random::<f64>() * 0.3,
    }
}

fn run_family(name: &str, build: impl Fn(&Dims) -> (NetworkSpec, usize, f64)) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc4ec);
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for case in 0..CONFIGS_PER_FAMILY {
        let dims = random_dims(&mut rng);
        let (spec, channels, l2) = build(&dims);
        let report = check_spec(&spec, channels, dims.batch, l2, 1000 + case as u64, DEFAULT_STEP);
        assert!(
            report.max_rel_err < TOLERANCE,
            "{name} config {case}: max relative error {} over {} gradients",
            report.max_rel_err,
            report.checked
        );
        worst = worst.max(report.max_rel_err);
        checked += report.checked;
    }
    println!("{name}: {CONFIGS_PER_FAMILY} configs, {checked} gradients, worst {worst:.2e}");
}

#[test]
fn conv2d_gradients() {
    run_family("conv2d", |d| {
        let spec = NetworkSpec {
            layers: vec![
                LayerSpec::Conv2d { in_channels: d.channels, maps: d.maps },
                LayerSpec::Flatten,
                LayerSpec::FullyConnected { inputs: d.maps * 64, outputs: d.classes },
                LayerSpec::Softmax,
            ],
        };
        (spec, d.channels, 0.0)
    });
}

#[test]
fn relu_gradients() {
    run_family("relu", |d| {
        let spec = NetworkSpec {
            layers: vec![
                LayerSpec::Conv2d { in_channels: d.channels, maps: d.maps },
                LayerSpec::Relu,
                LayerSpec::Flatten,
                LayerSpec::FullyConnected { inputs: d.maps * 64, outputs: d.hidden },
                LayerSpec::Relu,
                LayerSpec::FullyConnected { inputs: d.hidden, outputs: d.classes },
                LayerSpec::Softmax,
            ],
        };
        (spec, d.channels, 0.0)
    });
}

#[test]
fn batch_norm_train_mode_gradients() {
    run_family("batch_norm", |d| {
        let spec = NetworkSpec {
            layers: vec![
                LayerSpec::Conv2d { in_channels: d.channels, maps: d.maps },
                LayerSpec::BatchNorm { maps: d.maps },
                LayerSpec::Relu,
                LayerSpec::Flatten,
                LayerSpec::FullyConnected { inputs: d.maps * 64, outputs: d.classes },
                LayerSpec::Softmax,
            ],
        };
        (spec, d.channels, 0.0)
    });
}

#[test]
fn dropout_frozen_mask_gradients() {
    run_family("dropout", |d| {
        let spec = NetworkSpec {
            layers: vec![
                LayerSpec::Flatten,
                LayerSpec::FullyConnected { inputs: d.channels * 64, outputs: d.hidden },
                LayerSpec::Relu,
                LayerSpec::Dropout { rate: d.rate },
                LayerSpec::FullyConnected { inputs: d.hidden, outputs: d.classes },
                LayerSpec::Softmax,
            ],
        };
        (spec, d.channels, 0.0)
    });
}

#[test]
fn fully_connected_and_softmax_cross_entropy_gradients() {
    run_family("fc_softmax_ce", |d| {
        let spec = NetworkSpec {
            layers: vec![
                LayerSpec::Flatten,
                LayerSpec::FullyConnected { inputs: d.channels * 64, outputs: d.classes },
                LayerSpec::Softmax,
            ],
        };
        (spec, d.channels, 0.0)
    });
}

#[test]
fn l2_term_gradients() {
    run_family("l2_term", |d| {
        let spec = NetworkSpec {
            layers: vec![
                LayerSpec::Conv2d { in_channels: d.channels, maps: d.maps },
                LayerSpec::Relu,
                LayerSpec::Flatten,
                LayerSpec::FullyConnected { inputs: d.maps * 64, outputs: d.classes },
                LayerSpec::Softmax,
            ],
        };
        (spec, d.channels, d.l2)
    });
}

/// Everything at once: the full layer set stacked in one pipeline.
#[test]
fn composite_pipeline_gradients() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xf00d);
    for case in 0..5 {
        let maps = rng.random_range(1..=2);
        let spec = NetworkSpec {
            layers: vec![
                LayerSpec::Conv2d { in_channels: 2, maps },
                LayerSpec::BatchNorm { maps },
                LayerSpec::Relu,
                LayerSpec::Conv2d { in_channels: maps, maps: 2 },
                LayerSpec::Relu,
                LayerSpec::Flatten,
                LayerSpec::FullyConnected { inputs: 128, outputs: 6 },
                LayerSpec::Relu,
                LayerSpec::Dropout { rate: 0.5 },
                LayerSpec::FullyConnected { inputs: 6, outputs: 4 },
                LayerSpec::Softmax,
            ],
        };
        let report = check_spec(&spec, 2, 2, 0.1, 500 + case, DEFAULT_STEP);
        assert!(
            report.max_rel_err < TOLERANCE,
            "composite config {case}: max relative error {}",
            report.max_rel_err
        );
    }
}
