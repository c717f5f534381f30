use std::collections::BTreeSet;
use std::hint::black_box;

use adaptchain_core::fixtures::video_example;
use adaptchain_core::*;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn instance(interfaces: usize, adapters: usize, seed: u64) -> GeneratedInstance {
    random_instance(&GenParams {
        interface_count: interfaces,
        methods_per_interface: 1..=3,
        values_per_method: 1..=3,
        adapter_count: adapters,
        entry_density: 0.5,
        seed,
    })
    .unwrap()
}

fn apply(c: &mut Criterion) {
    let g = video_example();
    let mut group = c.benchmark_group("apply_adaptation");
    for id in ["Video1toVideo2", "Video2toVideo3"] {
        let adapter = g.adapter(id).unwrap();
        let full = adapter.source().full_vector();
        group.bench_with_input(BenchmarkId::new("full", id), &full, |b, p| {
            b.iter(|| apply_adaptation(adapter, black_box(p)).unwrap())
        });
    }
    group.finish();
}

fn tabulate(c: &mut Criterion) {
    let g = video_example();
    let mut group = c.benchmark_group("tabulate");
    for id in ["Video1toVideo2", "Video2toVideo3"] {
        let adapter = g.adapter(id).unwrap();
        group.bench_function(id, |b| {
            b.iter(|| tabulate_adaptation(black_box(adapter), DEFAULT_TABULATE_CAP).unwrap())
        });
    }
    group.finish();
}

fn search(c: &mut Criterion) {
    let mut group = c.benchmark_group("search");
    for (interfaces, adapters) in [(4, 8), (6, 16), (8, 24)] {
        let inst = instance(interfaces, adapters, 7);
        let sources: BTreeSet<String> = [inst.source.clone()].into();
        let weights = WeightMap::unit();
        let label = format!("{interfaces}x{adapters}");
        group.bench_function(BenchmarkId::new("greedy", &label), |b| {
            b.iter(|| greedy_chain(&inst.graph, black_box(&sources), &inst.target, &weights))
        });
        group.bench_function(BenchmarkId::new("oracle", &label), |b| {
            b.iter(|| {
                oracle_optimal(&inst.graph, black_box(&sources), &inst.target, &weights, DEFAULT_ORACLE_LIMIT)
            })
        });
    }
    group.finish();
}

criterion_group!(benches, apply, tabulate, search);
criterion_main!(benches);
