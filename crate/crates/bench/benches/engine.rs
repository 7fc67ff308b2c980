//! Benchmarks for the hot paths: invariant computation, validation,
//! body enumeration, canonical signatures, and a shallow minimization.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use vpbridge_core::corpus;
use vpbridge_core::invariant::{check_identities, invariants_unchecked};
use vpbridge_core::search::{canonical_signature, enumerate_bodies, minimize, SearchBudget};

fn bench_invariants(c: &mut Criterion) {
    let d = corpus::width92_stack();
    c.bench_function("invariants/width92", |b| {
        b.iter(|| invariants_unchecked(black_box(&d)))
    });
    c.bench_function("identities/width92", |b| {
        b.iter(|| check_identities(black_box(&d)))
    });
}

fn bench_validate(c: &mut Criterion) {
    let diagrams = corpus::random_corpus(42, 24);
    c.bench_function("validate/corpus24", |b| {
        b.iter(|| {
            for d in &diagrams {
                black_box(d.validate().is_valid());
            }
        })
    });
}

fn bench_enumeration(c: &mut Criterion) {
    c.bench_function("enumerate_bodies/1-4-2", |b| {
        b.iter(|| {
            enumerate_bodies(black_box(1), black_box(4), black_box(2))
                .unwrap()
                .len()
        })
    });
}

fn bench_signature(c: &mut Criterion) {
    let d = corpus::width92_stack();
    c.bench_function("canonical_signature/width92", |b| {
        b.iter(|| canonical_signature(black_box(&d)))
    });
}

fn bench_minimize(c: &mut Criterion) {
    let mut d = corpus::width92_stack();
    d.meta.irreducible = true;
    d.meta.every_sphere_separates = true;
    let budget = SearchBudget {
        max_depth: 1,
        max_diagrams: 200,
        netchi_cap: None,
        width_tracking: true,
    };
    c.bench_function("minimize/width92-depth1", |b| {
        b.iter(|| minimize(black_box(&d), &budget).unwrap().report.width)
    });
}

criterion_group!(
    benches,
    bench_invariants,
    bench_validate,
    bench_enumeration,
    bench_signature,
    bench_minimize
);
criterion_main!(benches);
