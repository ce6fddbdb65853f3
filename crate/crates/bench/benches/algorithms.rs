use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use submodlab_bench::{coverage, hard_small, symmetric_cut};
use submodlab_core::factor::grid_min;
use submodlab_core::fpt::{fpt, fpt_plus, greedy, FptConfig};
use submodlab_core::properties::{brute_force_opt, check_submodular, Mode};
use submodlab_core::stream::StreamOrder;
use submodlab_core::streaming::{symmetric_stream, StreamConfig};
use submodlab_core::{Limits, ProgramId};

fn streaming(c: &mut Criterion) {
    let mut group = c.benchmark_group("stream");
    for n in [16, 32, 64] {
        let inst = symmetric_cut(n);
        let order = StreamOrder::uniform(n, 1).unwrap();
        let cfg = StreamConfig::new(2, 0.5);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| symmetric_stream(black_box(&inst), &order, &cfg).unwrap())
        });
    }
    group.finish();
}

fn fixed_parameter(c: &mut Criterion) {
    let inst = symmetric_cut(16);
    let order = StreamOrder::uniform(16, 1).unwrap();
    let mut cfg = FptConfig::new(2, 0.5, 2);
    cfg.stream.threshold = Some(4);
    c.bench_function("fpt/n16_k2", |b| {
        b.iter(|| fpt(black_box(&inst), &order, &cfg).unwrap())
    });
    c.bench_function("fpt_plus/n16_k2", |b| {
        b.iter(|| fpt_plus(black_box(&inst), &order, &cfg).unwrap())
    });
}

fn baselines(c: &mut Criterion) {
    let inst = coverage(14);
    c.bench_function("greedy/n14_k4", |b| {
        b.iter(|| greedy(black_box(&inst), 4).unwrap())
    });
    c.bench_function("brute_force/n14_k4", |b| {
        b.iter(|| brute_force_opt(black_box(&inst), 4, &Limits::default()).unwrap())
    });
}

fn checks(c: &mut Criterion) {
    let inst = hard_small();
    c.bench_function("check_submodular/hard_n10", |b| {
        b.iter(|| check_submodular(black_box(&inst), Mode::Exhaustive, &Limits::default()).unwrap())
    });
    let mut group = c.benchmark_group("grid_min");
    group.sample_size(10);
    for id in [ProgramId::FptPlusB, ProgramId::SymA] {
        group.bench_function(id.name(), |b| b.iter(|| grid_min(id, 0.05, 0.0).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, streaming, fixed_parameter, baselines, checks);
criterion_main!(benches);
