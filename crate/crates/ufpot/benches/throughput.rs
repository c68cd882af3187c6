//! Raw forest throughput, compression on versus off, and batch replay
//! sequential versus data-parallel.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use ufpot::dsu::{DsuState, Variant};
use ufpot::runner::{run_trace, RunConfig};
use ufpot::workload::{gen_binomial, gen_random, Op, Trace};

fn replay_raw(trace: &Trace, variant: Variant) -> u64 {
    let mut dsu = DsuState::new(trace.n as usize, variant).unwrap();
    let mut checksum = 0u64;
    for op in &trace.ops {
        match *op {
            Op::Union(a, b) => {
                dsu.union(a, b).unwrap();
            }
            Op::Find(p) => {
                checksum = checksum.wrapping_add(dsu.find(p).unwrap().root.0 as u64);
            }
        }
    }
    checksum
}

fn bench_variants(c: &mut Criterion) {
    let trace = gen_random(100_000, 500_000, 1, 0.5);
    let mut group = c.benchmark_group("raw-ops");
    group.throughput(Throughput::Elements(trace.ops.len() as u64));
    for variant in Variant::ALL {
        group.bench_with_input(
            BenchmarkId::from_parameter(variant),
            &variant,
            |b, &variant| b.iter(|| replay_raw(&trace, variant)),
        );
    }
    group.finish();
}

fn bench_compression(c: &mut Criterion) {
    // Deep binomial tree with repeated deep finds: compression pays.
    let trace = gen_binomial(16, 50_000);
    let mut group = c.benchmark_group("binomial-finds");
    group.throughput(Throughput::Elements(trace.ops.len() as u64));
    for variant in [Variant::SIZE_ON, Variant::SIZE_OFF] {
        group.bench_with_input(
            BenchmarkId::from_parameter(variant),
            &variant,
            |b, &variant| b.iter(|| replay_raw(&trace, variant)),
        );
    }
    group.finish();
}

fn bench_batch(c: &mut Criterion) {
    let traces: Vec<Trace> = (0..8)
        .map(|seed| gen_random(128, 2_000, seed, 0.5))
        .collect();
    let config = RunConfig {
        keep_rows: false,
        ..RunConfig::default()
    };
    let mut group = c.benchmark_group("verified-batch");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| {
            traces
                .iter()
                .map(|t| run_trace(t, &config).unwrap().overall_pass)
                .filter(|&ok| ok)
                .count()
        })
    });
    #[cfg(feature = "parallel")]
    group.bench_function("rayon", |b| {
        b.iter(|| {
            ufpot::runner::run_batch(&traces, &config)
                .into_iter()
                .filter(|r| r.as_ref().map(|r| r.overall_pass).unwrap_or(false))
                .count()
        })
    });
    group.finish();
}

criterion_group!(benches, bench_variants, bench_compression, bench_batch);
criterion_main!(benches);
