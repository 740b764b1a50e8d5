//! Mean values of Dirichlet polynomials over `[T, 2T]`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::partition::{
    expand_window_n, expand_window_power, exact_reciprocal_sum, DirichletPoly, PartitionScheme,
    Window,
};
use crate::sum::{ComplexSum, NeumaierSum};

/// Largest support accepted by the double sum in [`mv_exact`].
pub const MV_EXACT_MAX_SUPPORT: usize = 100_000;
/// Window size and exponent limit for exact rational sums.
pub const EXACT_MAX_PRIMES: usize = 8;
pub const EXACT_MAX_R: usize = 8;

/// `∫_T^{2T} |A(1/2 + it)|² dt`, summed over all ordered index pairs.
pub fn mv_exact(a: &DirichletPoly, t: f64) -> Result<f64> {
    if a.len() > MV_EXACT_MAX_SUPPORT {
        return Err(LabError::Capacity(format!(
            "support {} exceeds {MV_EXACT_MAX_SUPPORT} for the exact mean value",
            a.len()
        )));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(LabError::Domain(format!("T = {t}")));
    }
    let terms: Vec<(f64, Complex64)> = a
        .iter()
        .map(|(n, c)| ((n as f64).ln(), c / (n as f64).sqrt()))
        .collect();
    let rows: Vec<Complex64> = terms
        .par_iter()
        .enumerate()
        .map(|(i, &(ln_n, bn))| {
            let mut acc = ComplexSum::new();
            for (k, &(ln_m, bm)) in terms.iter().enumerate() {
                let e = if k == i {
                    Complex64::new(t, 0.0)
                } else {
                    // (e^{2iTx} − e^{iTx}) / (ix) with x = log(m/n)
                    let x = ln_m - ln_n;
                    Complex64::from_polar(2.0 * (0.5 * t * x).sin() / x, 1.5 * t * x)
                };
                acc.add(bn * bm.conj() * e);
            }
            acc.value()
        })
        .collect();
    let total: Complex64 = rows.into_iter().collect::<ComplexSum>().value();
    let scale: f64 = t * terms.iter().map(|(_, b)| b.norm_sqr()).sum::<f64>();
    if total.im.abs() > 1e-9 * scale.max(total.re.abs()) {
        return Err(LabError::Accuracy {
            target: 1e-9,
            achieved: total.im.abs() / scale,
            context: "imaginary residue of the mean value".into(),
        });
    }
    Ok(total.re)
}

/// Diagonal term `T Σ |a(n)|²/n`.
pub fn mv_diagonal(a: &DirichletPoly, t: f64) -> f64 {
    t * a
        .iter()
        .map(|(n, c)| c.norm_sqr() / n as f64)
        .collect::<NeumaierSum>()
        .value()
}

/// Diagonal of `Π_{2 <= j < v} 𝒩_j(·; α) · 𝒫_v^r` assembled window by window.
pub fn mv_diagonal_factored(
    scheme: &PartitionScheme,
    alpha: f64,
    v: usize,
    r: usize,
    t: f64,
) -> Result<f64> {
    let mut prod = t;
    for j in 2..v {
        let nj = expand_window_n(scheme.window(j)?, alpha, u64::MAX)?;
        prod *= mv_diagonal(&nj, 1.0);
    }
    if r > 0 {
        let pv = expand_window_power(scheme.window(v)?, r)?;
        prod *= mv_diagonal(&pv, 1.0);
    }
    Ok(prod)
}

fn check_exact_limits(primes: &[u64], r: usize) -> Result<()> {
    if primes.len() > EXACT_MAX_PRIMES || r > EXACT_MAX_R {
        return Err(LabError::Capacity(format!(
            "exact sums need <= {EXACT_MAX_PRIMES} primes and r <= {EXACT_MAX_R}, got {} and {r}",
            primes.len()
        )));
    }
    Ok(())
}

/// Calls `visit(n, Π e_i!)` for every `n` over `primes` with `Ω(n) = r`.
fn for_each_omega(primes: &[u64], r: usize, visit: &mut dyn FnMut(&BigInt, &BigInt)) {
    fn rec(
        primes: &[u64],
        left: usize,
        n: BigInt,
        fact: BigInt,
        visit: &mut dyn FnMut(&BigInt, &BigInt),
    ) {
        match primes.split_first() {
            None => {
                if left == 0 {
                    visit(&n, &fact);
                }
            }
            Some((&p, rest)) => {
                let mut n_e = n;
                let mut f_e = fact;
                for e in 0..=left {
                    if e > 0 {
                        n_e *= p;
                        f_e *= e;
                    }
                    rec(rest, left - e, n_e.clone(), f_e.clone(), visit);
                }
            }
        }
    }
    rec(primes, r, BigInt::one(), BigInt::one(), visit);
}

fn factorial(r: usize) -> BigInt {
    (1..=r).fold(BigInt::one(), |acc, i| acc * i)
}

/// `Σ_{Ω(n) = r} g(n)/n` over integers supported on `primes`, exactly.
pub fn omega_sum(primes: &[u64], r: usize) -> Result<BigRational> {
    check_exact_limits(primes, r)?;
    let mut acc = BigRational::zero();
    for_each_omega(primes, r, &mut |n, fact| {
        acc += BigRational::new(BigInt::one(), n * fact);
    });
    Ok(acc)
}

/// `P^r / r!` with `P = Σ 1/p`, exactly.
pub fn power_over_factorial(primes: &[u64], r: usize) -> BigRational {
    let p = exact_reciprocal_sum(primes);
    let mut pow = BigRational::one();
    for _ in 0..r {
        pow *= &p;
    }
    pow / BigRational::from_integer(factorial(r))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SquaredOmegaSum {
    /// `Σ_{Ω(n) = r} (r! g(n))²/n`.
    pub value: BigRational,
    /// `r! P^r`.
    pub bound: BigRational,
}

impl SquaredOmegaSum {
    pub fn holds(&self) -> bool {
        self.value <= self.bound
    }
}

pub fn squared_omega_sum(primes: &[u64], r: usize) -> Result<SquaredOmegaSum> {
    check_exact_limits(primes, r)?;
    let rf = factorial(r);
    let mut value = BigRational::zero();
    for_each_omega(primes, r, &mut |n, fact| {
        let c = BigRational::new(rf.clone(), fact.clone());
        value += &c * &c / BigRational::from_integer(n.clone());
    });
    let bound = power_over_factorial(primes, r) * BigRational::from_integer(&rf * &rf);
    Ok(SquaredOmegaSum { value, bound })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerRatio {
    /// `Π_p (1 − k²/p)^{-1}`.
    pub product: f64,
    /// `(log hi / log lo)^{k²}`.
    pub comparator: f64,
    pub ratio: f64,
}

pub fn euler_product_ratio(window: &Window, k: f64) -> Result<EulerRatio> {
    if !(0.0..=2.0).contains(&k) {
        return Err(LabError::Domain(format!("k = {k} outside [0, 2]")));
    }
    let k2 = k * k;
    let mut log_prod = NeumaierSum::new();
    for &p in &window.primes {
        if p as f64 <= k2 {
            return Err(LabError::Domain(format!(
                "Euler product diverges: prime {p} <= k² = {k2}"
            )));
        }
        log_prod.add(-(-k2 / p as f64).ln_1p());
    }
    if !(window.lo > 1.0) {
        return Err(LabError::Domain(format!("window starts at {} <= 1", window.lo)));
    }
    let product = log_prod.value().exp();
    let comparator = (window.hi.ln() / window.lo.ln()).powf(k2);
    Ok(EulerRatio {
        product,
        comparator,
        ratio: product / comparator,
    })
}
