use blotto_core::*;
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn exhaustive_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("find_stable_all");
    for (n_a, n_b, m) in [(4u32, 3u32, 3usize), (6, 4, 4), (5, 5, 5)] {
        let inst = reference_instance(Outcome::Median, n_a, n_b, m).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(format!("{n_a}-{n_b}-m{m}")), &inst, |b, inst| {
            b.iter(|| find_stable(black_box(inst), SearchMode::All).unwrap())
        });
    }
    group.finish();
}

fn canonical_search(c: &mut Criterion) {
    let inst = reference_instance(Outcome::Mean, 6, 4, 4).unwrap();
    c.bench_function("find_stable_canonical/6-4-m4", |b| {
        b.iter(|| find_stable_canonical(black_box(&inst), SearchMode::All, u64::MAX).unwrap())
    });
}

fn stability_check(c: &mut Criterion) {
    let inst = reference_instance(Outcome::Median, 12, 8, 6).unwrap();
    let arr = construct_many_agents(12, 8, 6).unwrap();
    c.bench_function("is_stable/12-8-m6", |b| b.iter(|| is_stable(black_box(&inst), black_box(&arr)).unwrap()));
}

fn region_scan(c: &mut Criterion) {
    let config = ScanConfig::new(2, Outcome::Mean, 11);
    c.bench_function("scan_region/mean-m2-n11", |b| b.iter(|| scan_region(black_box(&config)).unwrap()));
}

criterion_group!(benches, exhaustive_search, canonical_search, stability_check, region_scan);
criterion_main!(benches);
