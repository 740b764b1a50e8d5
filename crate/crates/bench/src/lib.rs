//! Shared inputs for the benchmarks.

use zmlab_core::partition::{DirichletPoly, PartitionScheme};

/// Windows of consecutive primes used by the polynomial benchmarks.
pub fn bench_scheme() -> PartitionScheme {
    PartitionScheme::from_prime_windows(1e6, 1.0, 6.0, vec![vec![2, 3], vec![5, 7, 11], vec![13, 17, 19, 23]])
        .expect("static windows")
}

/// `Σ_{n <= len} n^{-s}`.
pub fn unit_poly(len: u64) -> DirichletPoly {
    DirichletPoly::from_real((1..=len).map(|n| (n, 1.0))).expect("positive indices")
}
