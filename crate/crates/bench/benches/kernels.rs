use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

use zmlab_bench::{bench_scheme, unit_poly};
use zmlab_core::meanvalue::{mv_exact, omega_sum};
use zmlab_core::partition::{eval_n, expand_n_coeffs, sieve_range};
use zmlab_core::twisted4::{big_a, ShiftTuple};
use zmlab_core::zeta::{hardy_z, zeta_em, zeta_grid};

fn zeta_kernels(c: &mut Criterion) {
    let mut g = c.benchmark_group("zeta");
    for t in [1e3, 1e5, 1e7] {
        g.bench_with_input(BenchmarkId::new("hardy_z", t), &t, |b, &t| b.iter(|| hardy_z(black_box(t))));
    }
    g.bench_function("euler_maclaurin_t1e3", |b| {
        b.iter(|| zeta_em(black_box(Complex64::new(0.5, 1e3)), 1e-10))
    });
    g.sample_size(10);
    g.bench_function("grid_1e4_points", |b| b.iter(|| zeta_grid(1e4, 1e4 + 200.0, 0.02, 1e-8)));
    g.finish();
}

fn arithmetic(c: &mut Criterion) {
    c.bench_function("sieve_1e7", |b| b.iter(|| sieve_range(0, black_box(10_000_000))));
    c.bench_function("omega_sum_6_primes_r5", |b| {
        b.iter(|| omega_sum(black_box(&[11, 13, 17, 19, 23, 29]), 5))
    });
    let shifts = ShiftTuple::new([
        Complex64::new(0.1, 0.05),
        Complex64::new(-0.08, 0.1),
        Complex64::new(0.04, -0.1),
        Complex64::new(-0.1, -0.02),
    ]);
    c.bench_function("big_a", |b| b.iter(|| big_a(black_box(&shifts))));
}

fn polynomials(c: &mut Criterion) {
    let scheme = bench_scheme();
    let s = Complex64::new(0.5, 12_345.6);
    c.bench_function("eval_n_window4", |b| b.iter(|| eval_n(&scheme, 4, black_box(s), -1.5)));
    let poly = expand_n_coeffs(&scheme, 4, -1.5, u64::MAX).expect("small window");
    c.bench_function("expanded_n_window4", |b| b.iter(|| poly.evaluate(black_box(s))));
    let mut g = c.benchmark_group("mv_exact");
    for len in [100, 1000] {
        let a = unit_poly(len);
        g.bench_with_input(BenchmarkId::from_parameter(len), &a, |b, a| b.iter(|| mv_exact(a, 1e6)));
    }
    g.finish();
}

criterion_group!(benches, zeta_kernels, arithmetic, polynomials);
criterion_main!(benches);
