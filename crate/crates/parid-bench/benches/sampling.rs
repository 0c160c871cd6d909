use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use parid::fenwick::SamplerTree;
use parid::{stream, StreamKind, WeightDistribution};
use std::hint::black_box;

fn bench_weight_draws(c: &mut Criterion) {
    let mut group = c.benchmark_group("weight_draws");
    for spec in [
        "zeta:tau=2.5,kmin=1",
        "zeta:tau=1.5,kmin=1",
        "explicit:1=0.5,2=0.5",
    ] {
        let d: WeightDistribution = spec.parse().unwrap();
        group.throughput(Throughput::Elements(1));
        group.bench_function(BenchmarkId::from_parameter(spec), |b| {
            let mut rng = stream(3, 0, StreamKind::Weights);
            b.iter(|| black_box(d.sample(&mut rng)))
        });
    }
    group.finish();
}

fn bench_fenwick(c: &mut Criterion) {
    let n = 100_000usize;
    let weights: Vec<f64> = (0..n).map(|i| 1.0 + (i % 17) as f64).collect();
    let tree = SamplerTree::from_weights(weights.clone());

    c.bench_function("fenwick_sample_1e5", |b| {
        let mut rng = stream(4, 0, StreamKind::Endpoints);
        b.iter(|| black_box(tree.sample(&mut rng)))
    });
    c.bench_function("fenwick_update_1e5", |b| {
        let mut t = SamplerTree::from_weights(weights.clone());
        let mut i = 0usize;
        b.iter(|| {
            i = (i + 7919) % n;
            t.add(i, 1.0);
        })
    });
}

criterion_group!(benches, bench_weight_draws, bench_fenwick);
criterion_main!(benches);
