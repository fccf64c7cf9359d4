//! Checkpoint round trips and thread-count determinism.

use othello_nn::{
    evaluate_topk, forward, he_init, load_model, load_model_expecting, save_model, train, Arch,
    Error, Examples, Mode, NetworkSpec, Parameters, Tensor, TrainConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_examples(n: usize, channels: usize, classes: usize, seed: u64) -> Examples {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let planes = (0..n * channels * 64).map(|_| rng.random::<f32>()).collect();
    let targets = (0..n).map(|_| rng.random_range(0..classes as u32)).collect();
    Examples::new(channels, classes, planes, targets)
}

#[test]
fn checkpoint_round_trip_is_bit_exact() {
    let spec = NetworkSpec::conv_stack(2, &[4, 4], 16, 60, true, true);
    let params: Parameters<f32> = he_init(&spec, 77);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.onn");
    save_model(&spec, &params, &path).unwrap();

    let (loaded_spec, loaded) = load_model(&path).unwrap();
    assert_eq!(loaded_spec, spec);
    assert_eq!(loaded, params);

    // Same outputs on a fixed batch.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let input = Tensor::from_vec(
        &[3, 2, 8, 8],
        (0..3 * 128).map(|_| rng.random::<f32>()).collect(),
    );
    let a = forward(&spec, &params, &input, Mode::Infer, None);
    let b = forward(&loaded_spec, &loaded, &input, Mode::Infer, None);
    assert_eq!(a.output.data(), b.output.data());
}

#[test]
fn checkpoint_arch_mismatch_is_rejected() {
    let conv4 = NetworkSpec::preset(Arch::Conv4, 2, false, false);
    let conv8 = NetworkSpec::preset(Arch::Conv8, 2, false, false);
    let params: Parameters<f32> = he_init(&conv4, 1);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("conv4.onn");
    save_model(&conv4, &params, &path).unwrap();
    assert!(load_model_expecting(&path, &conv4).is_ok());
    assert_eq!(load_model_expecting(&path, &conv8), Err(Error::ShapeMismatch));
}

#[test]
fn corrupt_checkpoints_are_rejected() {
    let spec = NetworkSpec::linear(2, 5);
    let params: Parameters<f32> = he_init(&spec, 2);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.onn");
    save_model(&spec, &params, &path).unwrap();
    let good = std::fs::read(&path).unwrap();

    let mut bad = good.clone();
    let mid = bad.len() / 2;
    bad[mid] ^= 0x40;
    std::fs::write(&path, &bad).unwrap();
    assert_eq!(load_model(&path).unwrap_err(), Error::ChecksumMismatch);

    let mut magic = good;
    magic[1] = b'?';
    std::fs::write(&path, &magic).unwrap();
    assert_eq!(load_model(&path).unwrap_err(), Error::BadMagic);
}

/// The training contract: identical results for any worker count, because
/// parallel loops only split disjoint outputs.
#[test]
fn training_is_bit_identical_across_thread_counts() {
    let spec = NetworkSpec::conv_stack(2, &[3], 8, 6, true, false);
    let data = small_examples(96, 2, 6, 11);
    let config =
        TrainConfig { epochs: 2, batch_size: 32, seed: 3, ..TrainConfig::default() };

    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| train(&spec, &data, Some(&data), &config).unwrap())
    };
    let (params_1, log_1) = run(1);
    let (params_2, log_2) = run(2);
    assert_eq!(params_1, params_2);
    assert_eq!(log_1.batch_losses, log_2.batch_losses);
    assert_eq!(log_1.entries, log_2.entries);

    let top1 = evaluate_topk(&spec, &params_1, &data, 1);
    assert_eq!(log_1.entries.last().unwrap().test_top1, Some(top1));
}
