use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use twvrp_core::binpack::{solve_plain, BinPackingInstance};
use twvrp_core::compact::{solve_by_clients, ClientOptions};
use twvrp_core::cvrp_dp::solve_cvrp_tw;
use twvrp_core::partition::{all_partitions, join_sets, MarkedPartition, MarkedPartitionSet};
use twvrp_core::reductions::{random_instance, RandomSpec};
use twvrp_core::vrp_dp::solve_vrp_tw;
use twvrp_core::{Variant, VrpInstance};

fn instances(variant: Variant, n: usize, count: u64) -> Vec<VrpInstance> {
    let spec = RandomSpec { vertices: (n, n), max_edges: 2 * n, weights: (1, 3), vehicles: (2, 2), variant, treewidth_two: true, ..RandomSpec::default() };
    (0..count).map(|seed| random_instance(&spec, seed)).collect()
}

fn uncapacitated(c: &mut Criterion) {
    let mut group = c.benchmark_group("vrp");
    for n in [6, 10, 14] {
        let insts = instances(Variant::Vrp, n, 8);
        group.bench_with_input(BenchmarkId::new("tw-dp", n), &insts, |b, insts| {
            b.iter(|| insts.iter().map(|i| solve_vrp_tw(black_box(i), None).unwrap().map(|s| s.weight)).collect::<Vec<_>>())
        });
        if n > 10 {
            continue;
        }
        group.bench_with_input(BenchmarkId::new("clients", n), &insts, |b, insts| {
            b.iter(|| insts.iter().map(|i| solve_by_clients(black_box(i), &ClientOptions { client_cap: None, ..ClientOptions::default() }).unwrap().map(|s| s.weight)).collect::<Vec<_>>())
        });
    }
    group.finish();
}

fn capacitated(c: &mut Criterion) {
    let mut group = c.benchmark_group("cvrp");
    group.sample_size(10);
    for variant in [Variant::LoadCvrp, Variant::GasCvrp, Variant::LoadGasCvrp] {
        let insts = instances(variant, 5, 6);
        group.bench_with_input(BenchmarkId::new("tw-dp", variant.name()), &insts, |b, insts| {
            b.iter(|| insts.iter().map(|i| solve_cvrp_tw(black_box(i), None).unwrap().map(|s| s.weight)).collect::<Vec<_>>())
        });
    }
    group.finish();
}

fn packing(c: &mut Criterion) {
    let bp = BinPackingInstance { sizes: vec![7, 5, 5, 4, 3, 3, 2, 2, 1, 1], capacity: 11, bins: 3 };
    c.bench_function("binpacking/plain-10", |b| b.iter(|| solve_plain(black_box(&bp)).unwrap()));
}

fn partitions(c: &mut Criterion) {
    let universe: Vec<usize> = (0..5).collect();
    let entries: Vec<MarkedPartition> = all_partitions(&universe).into_iter().enumerate().map(|(i, p)| MarkedPartition { partition: p, marked: vec![], weight: i as u64 % 7 }).collect();
    let set = MarkedPartitionSet::from_entries(universe, entries).unwrap();
    c.bench_function("partition/join-bell5", |b| b.iter(|| join_sets(black_box(&set), black_box(&set)).unwrap().len()));
}

criterion_group!(benches, uncapacitated, capacitated, packing, partitions);
criterion_main!(benches);
