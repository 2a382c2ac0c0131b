//! Batch differential checking: the rayon driver against the sequential one.
//! Without the `parallel` feature both entries run the same sequential loop.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use probsat::fuzz::{run, run_sequential};
use probsat::oracle::Profile;
use std::hint::black_box;

const CASES: usize = 200;

fn batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("fuzz_batch");
    group.sample_size(10);
    for profile in [Profile::PL, Profile::PPL, Profile::MODAL] {
        group.bench_with_input(BenchmarkId::new("sequential", profile), &profile, |b, p| {
            b.iter(|| black_box(run_sequential(p, 0, CASES)))
        });
        group.bench_with_input(BenchmarkId::new("parallel", profile), &profile, |b, p| {
            b.iter(|| black_box(run(p, 0, CASES)))
        });
    }
    group.finish();
}

criterion_group!(benches, batch);
criterion_main!(benches);
