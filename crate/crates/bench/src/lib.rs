//! Criterion benchmarks for the metric, clustering, neighbor search and
//! the full imputation loop, on the seeded synthetic tables.

use criterion::{BenchmarkId, Criterion};
use hmvi_core::clustering::{cluster, DEFAULT_MAX_ITER};
use hmvi_core::evaluation::inject_missing;
use hmvi_core::evaluation::synthetic::{generate, Shape};
use hmvi_core::imputer::{hmvi_impute, HmviConfig, RefreshPolicy};
use hmvi_core::metric::distance_matrix;
use hmvi_core::neighbors::natural_neighbor_search;
use hmvi_core::{Dataset, DissimilarityModel};

fn corrupted(n: usize, rate: f64) -> Dataset {
    let shape = Shape { n, ..Shape::MIXED };
    let truth = generate(shape, 1).dataset;
    inject_missing(&truth, rate, 2).expect("feasible rate").0
}

pub fn benchmarks(c: &mut Criterion) {
    let mut group = c.benchmark_group("metric");
    for n in [100, 200, 400] {
        let data = corrupted(n, 0.2);
        group
            .bench_with_input(BenchmarkId::new("fit", n), &data, |b, d| b.iter(|| DissimilarityModel::fit(d).unwrap()));
        let model = DissimilarityModel::fit(&data).unwrap();
        group.bench_with_input(BenchmarkId::new("distance_matrix", n), &data, |b, d| {
            b.iter(|| distance_matrix(d, &model))
        });
    }
    group.finish();

    let mut group = c.benchmark_group("structure");
    for n in [100, 200, 400] {
        let data = corrupted(n, 0.2);
        let matrix = distance_matrix(&data, &DissimilarityModel::fit(&data).unwrap());
        group.bench_with_input(BenchmarkId::new("cluster_k2", n), &matrix, |b, m| {
            b.iter(|| cluster(m, 2, 3, DEFAULT_MAX_ITER).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("natural_neighbors", n), &matrix, |b, m| {
            b.iter(|| natural_neighbor_search(m).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("hmvi_impute");
    group.sample_size(10);
    let data = corrupted(200, 0.2);
    for (name, refresh) in [("full", RefreshPolicy::Full), ("incremental", RefreshPolicy::Incremental)] {
        let config = HmviConfig::new(2).with_seed(5).with_refresh(refresh);
        group.bench_function(name, |b| b.iter(|| hmvi_impute(&data, &config).unwrap()));
    }
    group.finish();
}
