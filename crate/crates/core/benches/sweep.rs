use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use spasync::genbench::{generate_rmat, GenSpec};
use spasync::graph::partition_graph;
use spasync::oracle::dijkstra_seq;
use spasync::sweep::{map, map_seq};
use spasync::trishla::prune_full;
use spasync::{run_sssp, Graph, RunConfig, TermMode};

fn graph(scale: u32) -> Graph {
    generate_rmat(&GenSpec::new(scale, 16, 7)).unwrap()
}

fn prune_partitions(c: &mut Criterion) {
    let g = graph(13);
    let mut group = c.benchmark_group("prune_partitions");
    group.sample_size(10);
    for p in [4usize, 16] {
        group.bench_with_input(BenchmarkId::new("parallel", p), &p, |b, &p| {
            b.iter(|| map(partition_graph(&g, p).unwrap(), |part| prune_full(part).1))
        });
        group.bench_with_input(BenchmarkId::new("sequential", p), &p, |b, &p| {
            b.iter(|| map_seq(partition_graph(&g, p).unwrap(), |part| prune_full(part).1))
        });
    }
    group.finish();
}

fn seed_sweep(c: &mut Criterion) {
    let g = graph(10);
    let source = g.max_out_degree_vertex().unwrap();
    let seeds: Vec<u64> = (0..16).collect();
    let run = |seed: u64| run_sssp(&g, source, &RunConfig::sim(8, TermMode::TokenRing, seed)).unwrap().pops;
    let mut group = c.benchmark_group("sim_seed_sweep");
    group.sample_size(10);
    group.bench_function("parallel", |b| b.iter(|| map(seeds.clone(), run)));
    group.bench_function("sequential", |b| b.iter(|| map_seq(seeds.clone(), run)));
    group.finish();
}

fn multi_source_oracle(c: &mut Criterion) {
    let g = graph(14);
    let sources: Vec<u32> = (0..32).map(|i| i * 311 % g.n_vertices() as u32).collect();
    let solve = |s: u32| dijkstra_seq(&g, s).unwrap().pops;
    let mut group = c.benchmark_group("multi_source_oracle");
    group.sample_size(10);
    group.bench_function("parallel", |b| b.iter(|| black_box(map(sources.clone(), solve))));
    group.bench_function("sequential", |b| b.iter(|| black_box(map_seq(sources.clone(), solve))));
    group.finish();
}

fn rmat_generation(c: &mut Criterion) {
    // The generator goes through `map` internally; this measures whichever
    // backend the feature set selected.
    let mut group = c.benchmark_group("rmat_generation");
    group.sample_size(10);
    group.bench_function("scale16_ef16", |b| b.iter(|| black_box(graph(16).n_edges())));
    group.finish();
}

criterion_group!(benches, prune_partitions, seed_sweep, multi_source_oracle, rmat_generation);
criterion_main!(benches);
