use criterion::{criterion_group, criterion_main, Criterion};
use othello_nn::{
    backward, forward, he_init, Arch, Mode, NetworkSpec, Parameters, Tensor,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_batch(n: usize, channels: usize) -> (Tensor<f32>, Vec<u32>) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let data = (0..n * channels * 64).map(|_| rng.random::<f32>()).collect();
    let targets = (0..n).map(|_| rng.random_range(0..60)).collect();
    (Tensor::from_vec(&[n, channels, 8, 8], data), targets)
}

/// Forward+backward on a Conv4 batch. With the default `parallel` feature
/// this contrasts a single-thread pool against all cores; build with
/// `--no-default-features` to measure the plain sequential fallback.
fn bench_step(c: &mut Criterion) {
    let spec = NetworkSpec::preset(Arch::Conv4, 2, false, false);
    let params: Parameters<f32> = he_init(&spec, 7);
    let (input, targets) = random_batch(64, 2);
    let mut group = c.benchmark_group("conv4_fwd_bwd_batch64");
    group.sample_size(10);

    let step = || {
        let pass = forward(&spec, &params, &input, Mode::Train, None);
        let (grads, _) = backward(&spec, &params, &pass, &targets, 5e-4);
        grads.layers.len()
    };

    #[cfg(feature = "parallel")]
    for threads in [1usize, rayon::current_num_threads()] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        group.bench_function(format!("rayon_{threads}_threads"), |b| {
            b.iter(|| pool.install(step))
        });
    }
    #[cfg(not(feature = "parallel"))]
    group.bench_function("sequential", |b| b.iter(step));

    group.finish();
}

criterion_group!(benches, bench_step);
criterion_main!(benches);
