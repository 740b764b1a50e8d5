//! Finite Dirichlet polynomials and the window polynomials 𝒫_j, 𝒩_j.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::scheme::{PartitionScheme, Window};
use crate::error::{LabError, Result};
use crate::sum::ComplexSum;

/// Largest support any expansion may produce.
pub const MAX_SUPPORT: usize = 10_000_000;

const BASIS_EVAL_MAX: usize = 64;

/// How a polynomial was assembled from a scheme.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub alpha: f64,
    /// Windows `2..v` contribute `𝒩_j(s; alpha)`.
    pub v: usize,
    /// Power of `𝒫_v`.
    pub r: usize,
}

/// Sparse `n ↦ a(n)` with no stored zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletPoly {
    coeffs: BTreeMap<u64, Complex64>,
    /// Every prime dividing some index, ascending.
    basis: Vec<u64>,
    pub provenance: Option<Provenance>,
}

fn trial_factor_primes(mut n: u64, out: &mut Vec<u64>) {
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
}

impl DirichletPoly {
    pub fn one() -> Self {
        Self::from_parts(BTreeMap::from([(1, Complex64::new(1.0, 0.0))]), Vec::new())
    }

    /// Build from arbitrary `(n, a(n))` pairs; repeated indices accumulate.
    pub fn from_coeffs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, Complex64)>,
    {
        let mut coeffs = BTreeMap::new();
        for (n, a) in pairs {
            if n == 0 {
                return Err(LabError::InvalidParameter("Dirichlet index 0".into()));
            }
            *coeffs.entry(n).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        let mut basis = Vec::new();
        for &n in coeffs.keys() {
            trial_factor_primes(n, &mut basis);
        }
        basis.sort_unstable();
        basis.dedup();
        Ok(Self::from_parts(coeffs, basis))
    }

    pub fn from_real<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, f64)>,
    {
        Self::from_coeffs(pairs.into_iter().map(|(n, a)| (n, Complex64::new(a, 0.0))))
    }

    fn from_parts(mut coeffs: BTreeMap<u64, Complex64>, basis: Vec<u64>) -> Self {
        coeffs.retain(|_, a| *a != Complex64::new(0.0, 0.0));
        Self {
            coeffs,
            basis,
            provenance: None,
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest index in the support.
    pub fn n_max(&self) -> u64 {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    pub fn coeff(&self, n: u64) -> Complex64 {
        self.coeffs.get(&n).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&n, &a)| (n, a))
    }

    pub fn basis(&self) -> &[u64] {
        &self.basis
    }

    /// `n = Π p^e` over the basis primes. Panics if `n` has other factors.
    pub fn factorize(&self, mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        for &p in &self.basis {
            if n == 1 {
                break;
            }
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
        }
        assert_eq!(n, 1, "index has a prime factor outside the basis");
        out
    }

    /// `Σ a(n) n^{-s}`, summed in ascending `n`.
    ///
    /// With a small basis, `n^{-s}` is assembled from the `p^{-s}`.
    pub fn evaluate(&self, s: Complex64) -> Complex64 {
        let direct = |n: u64| (-s * (n as f64).ln()).exp();
        if self.basis.is_empty() || self.basis.len() > BASIS_EVAL_MAX {
            return self
                .coeffs
                .iter()
                .map(|(&n, &a)| a * direct(n))
                .collect::<ComplexSum>()
                .value();
        }
        let xs: Vec<Complex64> = self.basis.iter().map(|&p| direct(p)).collect();
        self.coeffs
            .iter()
            .map(|(&n, &a)| {
                let mut m = n;
                let mut x = Complex64::new(1.0, 0.0);
                for (&p, &xp) in self.basis.iter().zip(&xs) {
                    while m % p == 0 {
                        m /= p;
                        x *= xp;
                    }
                    if m == 1 {
                        break;
                    }
                }
                if m != 1 {
                    x *= direct(m);
                }
                a * x
            })
            .collect::<ComplexSum>()
            .value()
    }

    /// Value on the critical line at height `t`.
    pub fn evaluate_line(&self, t: f64) -> Complex64 {
        self.evaluate(Complex64::new(0.5, t))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let coeffs = self.coeffs.iter().map(|(&n, &a)| (n, a * c)).collect();
        let mut out = Self::from_parts(coeffs, self.basis.clone());
        out.provenance = self.provenance.clone();
        out
    }

    /// Dirichlet convolution.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let est = self.len().saturating_mul(other.len());
        if est > MAX_SUPPORT.saturating_mul(8) {
            return Err(LabError::Capacity(format!(
                "convolution of supports {} × {} too large",
                self.len(),
                other.len()
            )));
        }
        let mut coeffs: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (&m, &a) in &self.coeffs {
            for (&n, &b) in &other.coeffs {
                let k = m.checked_mul(n).ok_or_else(|| {
                    LabError::Capacity(format!("index overflow in {m} × {n}"))
                })?;
                *coeffs.entry(k).or_default() += a * b;
            }
        }
        if coeffs.len() > MAX_SUPPORT {
            return Err(LabError::Capacity(format!(
                "product support {} exceeds {MAX_SUPPORT}",
                coeffs.len()
            )));
        }
        let mut basis: Vec<u64> = self.basis.iter().chain(&other.basis).copied().collect();
        basis.sort_unstable();
        basis.dedup();
        Ok(Self::from_parts(coeffs, basis))
    }
}

/// `𝒫_j(s) = Σ_{p ∈ window} p^{-s}`.
pub fn eval_p(scheme: &PartitionScheme, j: usize, s: Complex64) -> Result<Complex64> {
    Ok(window_p(scheme.window(j)?, s))
}

pub(crate) fn window_p(w: &Window, s: Complex64) -> Complex64 {
    w.primes
        .iter()
        .map(|&p| (-s * (p as f64).ln()).exp())
        .collect::<ComplexSum>()
        .value()
}

/// `Σ_{m <= M} x^m / m!` by Horner.
pub(crate) fn truncated_exp(x: Complex64, m_cap: usize) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for m in (1..=m_cap).rev() {
        acc = 1.0 + acc * x / m as f64;
    }
    acc
}

/// `𝒩_j(s; α)` through the truncated exponential of `α 𝒫_j(s)`.
pub fn eval_n(scheme: &PartitionScheme, j: usize, s: Complex64, alpha: f64) -> Result<Complex64> {
    let w = scheme.window(j)?;
    Ok(window_n(w, s, alpha))
}

pub(crate) fn window_n(w: &Window, s: Complex64, alpha: f64) -> Complex64 {
    if w.is_empty() || alpha == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    truncated_exp(alpha * window_p(w, s), w.m_cap)
}

/// Number of exponent vectors over `k` primes with total at most `m`,
/// i.e. `C(m + k, k)`, saturating in f64.
fn support_bound(k: usize, m: usize) -> f64 {
    let mut c = 1.0;
    for i in 1..=k.min(m) {
        c *= (m.max(k) + i) as f64 / i as f64;
    }
    c
}

/// Visit every exponent vector over `primes` with `Σ e` in `[lo, hi]`
/// lexicographically, passing `(n, Σ e, Π 1/e_i!)`.
fn enumerate_exponents(
    primes: &[u64],
    lo: usize,
    hi: usize,
    n_cap: u64,
    visit: &mut dyn FnMut(u64, usize, f64),
) -> std::result::Result<(), u64> {
    fn rec(
        primes: &[u64],
        idx: usize,
        n: u64,
        omega: usize,
        g: f64,
        lo: usize,
        hi: usize,
        n_cap: u64,
        visit: &mut dyn FnMut(u64, usize, f64),
    ) -> std::result::Result<(), u64> {
        if idx == primes.len() {
            if omega >= lo {
                visit(n, omega, g);
            }
            return Ok(());
        }
        let p = primes[idx];
        let mut n_e = n;
        let mut g_e = g;
        let mut e = 0usize;
        loop {
            rec(primes, idx + 1, n_e, omega + e, g_e, lo, hi, n_cap, visit)?;
            if omega + e == hi {
                return Ok(());
            }
            e += 1;
            n_e = match n_e.checked_mul(p) {
                Some(v) if v <= n_cap => v,
                _ => return Err(p),
            };
            g_e /= e as f64;
        }
    }
    rec(primes, 0, 1, 0, 1.0, lo, hi, n_cap, visit)
}

/// Coefficients `α^{Ω(n)} g(n)` of `𝒩_j(s; α)` over the full support
/// `{n : p | n ⇒ p ∈ window, Ω(n) <= M_j}`.
pub fn expand_n_coeffs(
    scheme: &PartitionScheme,
    j: usize,
    alpha: f64,
    n_cap: u64,
) -> Result<DirichletPoly> {
    let w = scheme.window(j)?;
    expand_window_n(w, alpha, n_cap)
}

pub(crate) fn expand_window_n(w: &Window, alpha: f64, n_cap: u64) -> Result<DirichletPoly> {
    if alpha == 0.0 || w.is_empty() {
        let mut one = DirichletPoly::one();
        one.basis = w.primes.clone();
        return Ok(one);
    }
    if support_bound(w.primes.len(), w.m_cap) > MAX_SUPPORT as f64 {
        return Err(LabError::Capacity(format!(
            "window j = {} ({} primes, M = {}) has more than {MAX_SUPPORT} coefficients",
            w.j,
            w.primes.len(),
            w.m_cap
        )));
    }
    let mut coeffs = BTreeMap::new();
    let mut alpha_pow = vec![1.0; w.m_cap + 1];
    for m in 1..=w.m_cap {
        alpha_pow[m] = alpha_pow[m - 1] * alpha;
    }
    enumerate_exponents(&w.primes, 0, w.m_cap, n_cap, &mut |n, omega, g| {
        coeffs.insert(n, Complex64::new(alpha_pow[omega] * g, 0.0));
    })
    .map_err(|p| {
        LabError::Capacity(format!(
            "window j = {}: support exceeds N_cap = {n_cap} at prime {p}",
            w.j
        ))
    })?;
    Ok(DirichletPoly::from_parts(coeffs, w.primes.clone()))
}

/// Coefficients `r! g(n)` (`Ω(n) = r`) of `𝒫_j(s)^r`.
pub(crate) fn expand_window_power(w: &Window, r: usize) -> Result<DirichletPoly> {
    if support_bound(w.primes.len(), r) > MAX_SUPPORT as f64 {
        return Err(LabError::Capacity(format!(
            "window j = {}: 𝒫^{r} has more than {MAX_SUPPORT} coefficients",
            w.j
        )));
    }
    let r_fact: f64 = (1..=r).map(|i| i as f64).product();
    let mut coeffs = BTreeMap::new();
    enumerate_exponents(&w.primes, r, r, u64::MAX, &mut |n, _, g| {
        coeffs.insert(n, Complex64::new(r_fact * g, 0.0));
    })
    .map_err(|p| LabError::Capacity(format!("window j = {}: index overflow at {p}", w.j)))?;
    Ok(DirichletPoly::from_parts(coeffs, w.primes.clone()))
}

/// `Π_{2 <= j < v} 𝒩_j(s; α) · 𝒫_v(s)^r` as explicit coefficients.
pub fn product_poly_coeffs(
    scheme: &PartitionScheme,
    alpha: f64,
    v: usize,
    r: usize,
) -> Result<DirichletPoly> {
    if v < 2 || v > scheme.ell + 1 {
        return Err(LabError::InvalidParameter(format!(
            "cutoff v = {v} outside [2, {}]",
            scheme.ell + 1
        )));
    }
    let mut acc = DirichletPoly::one();
    for j in 2..v {
        let nj = expand_window_n(scheme.window(j)?, alpha, u64::MAX)?;
        acc = acc.mul(&nj)?;
    }
    if r > 0 {
        let pv = expand_window_power(scheme.window(v)?, r)?;
        acc = acc.mul(&pv)?;
    }
    acc.provenance = Some(Provenance { alpha, v, r });
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::build_partition;
    use crate::partition::PartitionParams;
    use std::f64::consts::E;

    fn tiny(windows: Vec<Vec<u64>>, c_omega: f64) -> PartitionScheme {
        PartitionScheme::from_prime_windows(1e4, 1.0, c_omega, windows).unwrap()
    }

    fn real(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn eval_p_small_window() {
        let s = tiny(vec![vec![2, 3, 5, 7]], 10.0);
        let v = eval_p(&s, 2, real(1.0)).unwrap();
        assert!((v.re - 247.0 / 210.0).abs() < 1e-15);
        let z = Complex64::new(0.5, 13.0);
        let a = eval_p(&s, 2, z).unwrap();
        let b = eval_p(&s, 2, z.conj()).unwrap();
        assert!((a.conj() - b).norm() < 1e-15);
    }

    #[test]
    fn empty_window_polynomials() {
        let p = PartitionParams::desk_small(1e10);
        let s = build_partition(&p).unwrap();
        let z = Complex64::new(0.5, 20.0);
        assert_eq!(eval_p(&s, 2, z).unwrap(), real(0.0));
        assert_eq!(eval_n(&s, 2, z, 1.5).unwrap(), real(1.0));
        let _ = E;
    }

    #[test]
    fn eval_n_small_cases() {
        // M = floor(3 · 5/6) = 2
        let s = tiny(vec![vec![2, 3]], 3.0);
        assert_eq!(s.window(2).unwrap().m_cap, 2);
        assert_eq!(eval_n(&s, 2, real(1.0), 0.0).unwrap(), real(1.0));
        let v = eval_n(&s, 2, real(1.0), 1.0).unwrap();
        assert!((v.re - (1.0 + 5.0 / 6.0 + 25.0 / 72.0)).abs() < 1e-15);
    }

    #[test]
    fn expand_n_small_window() {
        let s = tiny(vec![vec![2, 3]], 3.0);
        let poly = expand_n_coeffs(&s, 2, 1.0, u64::MAX).unwrap();
        let expected = [(1, 1.0), (2, 1.0), (3, 1.0), (4, 0.5), (6, 1.0), (9, 0.5)];
        assert_eq!(poly.len(), expected.len());
        for (n, a) in expected {
            assert_eq!(poly.coeff(n), real(a), "n = {n}");
        }
        let zero = expand_n_coeffs(&s, 2, 0.0, u64::MAX).unwrap();
        assert_eq!(zero.iter().collect::<Vec<_>>(), vec![(1, real(1.0))]);
    }

    #[test]
    fn expand_n_respects_caps() {
        let s = tiny(vec![vec![2, 3]], 3.0);
        assert!(matches!(expand_n_coeffs(&s, 2, 1.0, 5), Err(LabError::Capacity(_))));
        let wide: Vec<u64> = crate::partition::sieve_primes(2.0, 2000.0).unwrap();
        let s = tiny(vec![wide], 40.0);
        let err = expand_n_coeffs(&s, 2, 1.0, u64::MAX).unwrap_err();
        assert!(err.to_string().contains("j = 2"), "{err}");
    }

    #[test]
    fn expansion_matches_truncated_exponential() {
        let s = tiny(vec![vec![11, 13, 17, 19]], 30.0);
        let w = s.window(2).unwrap();
        assert!(w.m_cap >= 5);
        let poly = expand_n_coeffs(&s, 2, -1.3, u64::MAX).unwrap();
        for t in [0.0, 14.1, 100.0, 2345.6] {
            let z = Complex64::new(0.5, t);
            let a = eval_n(&s, 2, z, -1.3).unwrap();
            let b = poly.evaluate(z);
            assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0), "t = {t}: {a} vs {b}");
        }
    }

    #[test]
    fn product_polynomials() {
        let s = tiny(vec![vec![2, 3]], 3.0);
        let one = product_poly_coeffs(&s, 1.0, 2, 0).unwrap();
        assert_eq!(one.iter().collect::<Vec<_>>(), vec![(1, real(1.0))]);
        let p1 = product_poly_coeffs(&s, 1.0, 2, 1).unwrap();
        assert_eq!(p1.iter().collect::<Vec<_>>(), vec![(2, real(1.0)), (3, real(1.0))]);
        let p2 = product_poly_coeffs(&s, 1.0, 2, 2).unwrap();
        assert_eq!(
            p2.iter().collect::<Vec<_>>(),
            vec![(4, real(1.0)), (6, real(2.0)), (9, real(1.0))]
        );
        assert_eq!(p2.provenance, Some(Provenance { alpha: 1.0, v: 2, r: 2 }));
    }

    #[test]
    fn factorize_over_basis() {
        let p = DirichletPoly::from_real([(12, 1.0), (35, 2.0)]).unwrap();
        assert_eq!(p.basis(), &[2, 3, 5, 7]);
        assert_eq!(p.factorize(12), vec![(2, 2), (3, 1)]);
        assert_eq!(p.factorize(1), vec![]);
    }

    #[test]
    fn zero_coefficients_are_not_stored() {
        let p = DirichletPoly::from_real([(1, 1.0), (2, 0.0), (3, 1.0), (3, -1.0)]).unwrap();
        assert_eq!(p.len(), 1);
        assert!(DirichletPoly::from_real([(0, 1.0)]).is_err());
    }
}
