use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, Criterion};
use othello_dataset::{build_variant, DatasetVariant};
use othello_wthor::{parse_wtb, replay_all, ReplayedGame};

fn fixture_games() -> Vec<ReplayedGame> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../wthor/fixtures/synthetic_100.wtb");
    let bytes = std::fs::read(path).expect("bundled fixture present");
    replay_all(&parse_wtb(&bytes).unwrap().1).replayed
}

/// Unique-S construction over the fixture corpus. With the default
/// `parallel` feature this compares a single-thread pool against all cores;
/// build with `--no-default-features` to measure the plain sequential path.
fn bench_build(c: &mut Criterion) {
    let games = fixture_games();
    let mut group = c.benchmark_group("build_unique_s");

    #[cfg(feature = "parallel")]
    {
        for threads in [1usize, rayon::current_num_threads()] {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            group.bench_function(format!("rayon_{threads}_threads"), |b| {
                b.iter(|| pool.install(|| build_variant(&games, DatasetVariant::UniqueS).len()))
            });
        }
    }
    #[cfg(not(feature = "parallel"))]
    group.bench_function("sequential", |b| {
        b.iter(|| build_variant(&games, DatasetVariant::UniqueS).len())
    });

    group.finish();
}

criterion_group!(benches, bench_build);
criterion_main!(benches);
