//! Prime windows and the Dirichlet polynomials built on them.

mod poly;
mod scheme;
mod sieve;

pub use poly::{
    eval_n, eval_p, expand_n_coeffs, product_poly_coeffs, DirichletPoly, Provenance, MAX_SUPPORT,
};
pub(crate) use poly::{expand_window_n, expand_window_power, window_n, window_p};
pub use scheme::{
    build_partition, exact_reciprocal_sum, iterated_log, PartitionMode, PartitionParams,
    PartitionScheme, SchemeExport, Window,
};
pub use sieve::{sieve_primes, sieve_range, small_primes, SIEVE_LIMIT};
