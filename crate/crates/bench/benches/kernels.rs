use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use dgtor::complex::homology;
use dgtor::dg::{examples, homology_algebra};
use dgtor::gen::{self, AlgebraShape};
use dgtor::linalg::{kernel_basis, rank};
use dgtor::resolution::{derived_tensor, semifree_replace_with};
use dgtor::spectral::tor_spectral_sequence;

fn linear_algebra(c: &mut Criterion) {
    let mut rng = gen::rng(1);
    let m = gen::random_matrix(&mut rng, 40, 48);
    c.bench_function("rank 40x48", |b| b.iter(|| rank(black_box(&m))));
    c.bench_function("kernel 40x48", |b| b.iter(|| kernel_basis(black_box(&m))));
    let complex = gen::random_complex(&mut rng, 5, 12);
    c.bench_function("homology of a random complex", |b| b.iter(|| homology(black_box(&complex))));
}

fn resolutions(c: &mut Criterion) {
    let a = examples::dual_numbers();
    let ha = homology_algebra(&a).unwrap();
    let k = examples::residue_module(&a);
    c.bench_function("semifree replacement of k over k[e], window 8", |b| {
        b.iter(|| semifree_replace_with(black_box(&k), 8, &ha).unwrap())
    });
    c.bench_function("k ⊗^L k over k[e], window 8", |b| b.iter(|| derived_tensor(black_box(&k), &k, 8).unwrap()));
}

fn spectral(c: &mut Criterion) {
    let a = examples::dual_numbers();
    let k = examples::residue_module(&a);
    c.bench_function("Tor spectral sequence of k, k over k[e], window 6", |b| {
        b.iter(|| tor_spectral_sequence(black_box(&k), &k, 6, 6).unwrap())
    });
    let mut rng = gen::rng(3);
    let alg = gen::random_algebra(&mut rng, AlgebraShape::default());
    let m = gen::random_module(&mut rng, &alg, 2);
    let n = gen::random_module(&mut rng, &alg, 2);
    c.bench_function("Tor spectral sequence of random modules, window 5", |b| {
        b.iter(|| tor_spectral_sequence(black_box(&m), &n, 5, 5).unwrap())
    });
}

criterion_group!(benches, linear_algebra, resolutions, spectral);
criterion_main!(benches);
