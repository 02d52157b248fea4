use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use threewc::adaptive::simulate_block_markov;
use threewc::channel::{sample_channel, sample_states};
use threewc::polytope::rat;
use threewc::restricted::sweep_snr;
use threewc::{
    AdaptiveConfig, IntermittencyConfig, NodeConfig, Scheme, StreamAllocation, Tolerance,
};

fn bench_scheme(c: &mut Criterion) {
    let cfg = NodeConfig::new(4, 3, 2).unwrap();
    let alloc = StreamAllocation::sum_dof_optimal(cfg);
    let ch = sample_channel(cfg, 1).unwrap();
    let tol = Tolerance::default();

    c.bench_function("synthesize_432", |b| {
        b.iter(|| Scheme::synthesize(black_box(alloc.clone()), &ch, tol, 1).unwrap())
    });

    let scheme = Scheme::synthesize(alloc, &ch, tol, 1).unwrap();
    let ic = IntermittencyConfig::new(0.5).unwrap();
    let states = sample_states(1000, ic, 1).unwrap();
    c.bench_function("rate_sweep_432", |b| {
        b.iter(|| sweep_snr(&scheme, &ch, black_box(&[40.0, 50.0, 60.0]), ic, &states).unwrap())
    });

    let ac =
        AdaptiveConfig::optimal(NodeConfig::new(3, 2, 1).unwrap(), rat(1, 2), 10_000, 50).unwrap();
    c.bench_function("block_markov_321_n1e4_b50", |b| {
        b.iter(|| simulate_block_markov(black_box(&ac), 0).unwrap())
    });
}

criterion_group!(benches, bench_scheme);
criterion_main!(benches);
