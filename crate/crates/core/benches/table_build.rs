//! Parallel vs sequential structure-table builds.
//!
//! The table is an embarrassingly parallel map over independent OPE entries
//! (and, inside each entry, over sample ranks); this suite measures the same
//! build with the rayon pool on and off. Run with
//! `cargo bench -p vertexalg`.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use vertexalg::lalg::{build_table, RankPool, SamplingPolicy, TableConfig};
use vertexalg::par::Parallelism;

fn bench_table_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("table_build");
    group.sample_size(10);
    for (name, config) in [
        (
            "pairs<=3",
            TableConfig {
                pair_cutoff: 3,
                weight_cutoff: 4,
                s_min: 0,
            },
        ),
        (
            "pairs<=4",
            TableConfig {
                pair_cutoff: 4,
                weight_cutoff: 4,
                s_min: 0,
            },
        ),
    ] {
        for (mode_name, mode) in [
            ("parallel", Parallelism::Parallel),
            ("sequential", Parallelism::Sequential),
        ] {
            group.bench_with_input(
                BenchmarkId::new(mode_name, name),
                &(config, mode),
                |b, &(config, mode)| {
                    b.iter(|| {
                        build_table(config, SamplingPolicy::default(), mode).unwrap();
                    })
                },
            );
        }
    }
    group.finish();
}

fn bench_closure_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("closure_rank4");
    group.sample_size(10);
    let entries: Vec<(u16, i32, u16)> = {
        let mut v = Vec::new();
        for i in 1..=3u16 {
            for j in 1..=3u16 {
                for s in 0..=(i as i32 + j as i32 - 1) {
                    v.push((i, s, j));
                }
            }
        }
        v
    };
    for (mode_name, mode) in [
        ("parallel", Parallelism::Parallel),
        ("sequential", Parallelism::Sequential),
    ] {
        group.bench_function(mode_name, |b| {
            b.iter(|| {
                let pool = RankPool::new();
                let results = vertexalg::par::run_map(entries.clone(), mode, |(i, s, j)| {
                    pool.ope(4, i, s, j).unwrap()
                });
                criterion::black_box(results);
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_table_build, bench_closure_scan);
criterion_main!(benches);
