//! The arithmetic factors `A`, `B`, `F` and the factored `G`.

use std::collections::HashMap;

use num_complex::Complex64;

use super::shifts::{sigma_prime_power, ShiftTuple};
use crate::error::{LabError, Result};
use crate::partition::{expand_window_n, expand_window_power, DirichletPoly, PartitionScheme, Window};
use crate::sum::ComplexSum;
use crate::zeta::zeta;

/// Default relative truncation tolerance for the local sums.
pub const LOCAL_TOL: f64 = 1e-12;
const MAX_LOCAL_TERMS: usize = 100_000;
const ZETA_TARGET: f64 = 1e-12;
const MAX_SHELL: u32 = 200;

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `Σ_{j>=0} σ_{z1,z2}(p^{u+j}) σ_{z3,z4}(p^j) / p^j`, truncated once the
/// bound on the remaining terms drops below `tol` times the partial sum.
fn local_series(p: u64, u: u32, s: &ShiftTuple, tol: f64) -> Result<Complex64> {
    let [z1, z2, z3, z4] = s.z;
    let lp = (p as f64).ln();
    let ex = |z: Complex64| (-z * lp).exp();
    let (x1, x2, x3, x4) = (ex(z1), ex(z2), ex(z3), ex(z4));
    let big_x = x1.norm().max(x2.norm());
    let big_y = x3.norm().max(x4.norm());
    let rho = big_x * big_y / p as f64;
    if rho >= 1.0 {
        return Err(LabError::Domain(format!(
            "local sum at p = {p} diverges for shifts {:?} (ratio {rho})",
            s.z
        )));
    }
    let inv_p = 1.0 / p as f64;
    // σ_{z1,z2}(p^{u+j}) and σ_{z3,z4}(p^j) by the recurrence S_e = y S_{e-1} + x^e
    let mut a = sigma_prime_power(p, u, z1, z2);
    let mut x1e = x1.powu(u);
    let mut b = Complex64::new(1.0, 0.0);
    let mut x3e = Complex64::new(1.0, 0.0);
    let mut pj = 1.0;
    let mut acc = ComplexSum::new();
    let uf = u as f64;
    for j in 0..MAX_LOCAL_TERMS {
        acc.add(a * b * pj);
        let jf = j as f64;
        // |σ(p^e)| <= (e + 1) max(|x|, |y|)^e
        let next = (uf + jf + 2.0) * (jf + 2.0) * big_x.powf(uf) * rho.powf(jf + 1.0);
        let growth = (uf + jf + 3.0) * (jf + 3.0) / ((uf + jf + 2.0) * (jf + 2.0));
        let q = growth * rho;
        if q < 1.0 && next / (1.0 - q) <= tol * acc.value().norm() {
            return Ok(acc.value());
        }
        x1e *= x1;
        a = x2 * a + x1e;
        x3e *= x3;
        b = x4 * b + x3e;
        pj *= inv_p;
    }
    Err(LabError::Accuracy {
        target: tol,
        achieved: f64::NAN,
        context: format!("local sum at p = {p} after {MAX_LOCAL_TERMS} terms"),
    })
}

/// Local factor of `B_{z1,z2,z3,z4}` at `p^u`.
pub fn local_b(p: u64, u: u32, shifts: &ShiftTuple, tol: f64) -> Result<Complex64> {
    if p < 2 {
        return Err(LabError::Domain(format!("p = {p}")));
    }
    if u == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let num = local_series(p, u, shifts, tol)?;
    let den = local_series(p, 0, shifts, tol)?;
    if den.norm() <= tol {
        return Err(LabError::Domain(format!("degenerate local denominator at p = {p}")));
    }
    Ok(num / den)
}

/// `B_{z1,z2,z3,z4}(n)` as the product of its local factors.
pub fn big_b(n: u64, shifts: &ShiftTuple, tol: f64) -> Result<Complex64> {
    let mut acc = Complex64::new(1.0, 0.0);
    for (p, e) in factor(n) {
        acc *= local_b(p, e, shifts, tol)?;
    }
    Ok(acc)
}

/// `ζ(1+z1+z3) ζ(1+z1+z4) ζ(1+z2+z3) ζ(1+z2+z4) / ζ(2+z1+z2+z3+z4)`.
pub fn big_a(shifts: &ShiftTuple) -> Result<Complex64> {
    shifts.check_poles()?;
    let one = Complex64::new(1.0, 0.0);
    let mut num = one;
    for w in shifts.cross_sums() {
        num *= zeta(one + w, ZETA_TARGET)?;
    }
    Ok(num / zeta(2.0 * one + shifts.sum(), ZETA_TARGET)?)
}

/// Memo of `B` and `B̃` values at one shift tuple.
pub(crate) struct BCache<'a> {
    shifts: &'a ShiftTuple,
    swapped: ShiftTuple,
    tol: f64,
    local: HashMap<(u64, u32, bool), Complex64>,
}

impl<'a> BCache<'a> {
    pub(crate) fn new(shifts: &'a ShiftTuple, tol: f64) -> Self {
        Self {
            shifts,
            swapped: shifts.swapped(),
            tol,
            local: HashMap::new(),
        }
    }

    fn b(&mut self, n: u64, tilde: bool) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for (p, e) in factor(n) {
            let key = (p, e, tilde);
            let v = match self.local.get(&key) {
                Some(v) => *v,
                None => {
                    let s = if tilde { &self.swapped } else { self.shifts };
                    let v = local_b(p, e, s, self.tol)?;
                    self.local.insert(key, v);
                    v
                }
            };
            acc *= v;
        }
        Ok(acc)
    }

    /// `Σ_{m,n} a(n) conj(a(m)) / [m,n] · B(n/(m,n)) B̃(m/(m,n))`.
    pub(crate) fn pair_sum(&mut self, twist: &DirichletPoly) -> Result<Complex64> {
        let terms: Vec<(u64, Complex64)> = twist.iter().collect();
        let mut acc = ComplexSum::new();
        for &(n, an) in &terms {
            for &(m, am) in &terms {
                let g = gcd(m, n);
                let lcm = (m / g) as f64 * n as f64;
                let bn = self.b(n / g, false)?;
                let bm = self.b(m / g, true)?;
                acc.add(an * am.conj() / lcm * bn * bm);
            }
        }
        Ok(acc.value())
    }
}

/// Largest twist support accepted by the generic double sum.
pub const PAIR_SUM_MAX_SUPPORT: usize = 100_000;

/// The double sum in `F` without the factor `A`.
pub fn twist_pair_sum(shifts: &ShiftTuple, twist: &DirichletPoly, tol: f64) -> Result<Complex64> {
    if twist.len() > PAIR_SUM_MAX_SUPPORT {
        return Err(LabError::Capacity(format!(
            "twist support {} exceeds {PAIR_SUM_MAX_SUPPORT}",
            twist.len()
        )));
    }
    BCache::new(shifts, tol).pair_sum(twist)
}

/// `F = A · Σ_{m,n} a(n) conj(a(m)) / [m,n] · B(n/(m,n)) B̃(m/(m,n))`.
pub fn big_f(shifts: &ShiftTuple, twist: &DirichletPoly) -> Result<Complex64> {
    Ok(big_a(shifts)? * twist_pair_sum(shifts, twist, LOCAL_TOL)?)
}

/// `G` split into the per-window pair sums and the window-`v` factor.
#[derive(Clone, Debug, PartialEq)]
pub struct GFactors {
    /// Pair sums for `j = 2, …, v − 1`.
    pub windows: Vec<Complex64>,
    /// Pair sum of `𝒫_v^r` (1 when `r = 0`).
    pub v_factor: Complex64,
    pub total: Complex64,
}

/// `G` for the twist `Π_{2<=j<v} 𝒩_j(·; alpha) · 𝒫_v^r`, one window at a time.
pub fn big_g_factored(
    shifts: &ShiftTuple,
    scheme: &PartitionScheme,
    alpha: f64,
    v: usize,
    r: usize,
) -> Result<GFactors> {
    if v < 2 || v > scheme.ell + 1 {
        return Err(LabError::InvalidParameter(format!(
            "cutoff v = {v} outside [2, {}]",
            scheme.ell + 1
        )));
    }
    let mut cache = BCache::new(shifts, LOCAL_TOL);
    let mut windows = Vec::new();
    let mut total = Complex64::new(1.0, 0.0);
    for j in 2..v {
        let nj = expand_window_n(scheme.window(j)?, alpha, u64::MAX)?;
        let g = cache.pair_sum(&nj)?;
        total *= g;
        windows.push(g);
    }
    let v_factor = if r == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        let pv = expand_window_power(scheme.window(v)?, r)?;
        cache.pair_sum(&pv)?
    };
    total *= v_factor;
    Ok(GFactors {
        windows,
        v_factor,
        total,
    })
}

/// `18^r r! P^r e^P`.
pub fn v_factor_bound(p_v: f64, r: usize) -> f64 {
    let mut b = p_v.exp();
    for i in 1..=r {
        b *= 18.0 * i as f64 * p_v;
    }
    b
}

/// Per-prime pair sums with the `Ω` constraint dropped, next to their
/// `a, b <= 1` truncation.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowEuler {
    pub unconstrained: Complex64,
    pub leading: Complex64,
}

/// `Π_p Σ_{a,b>=0} α^{a+b} g(p^a) g(p^b) / p^{max(a,b)} B(p^{a−min}) B̃(p^{b−min})`.
pub fn window_euler_product(
    window: &Window,
    alpha: f64,
    shifts: &ShiftTuple,
    tol: f64,
) -> Result<WindowEuler> {
    let sw = shifts.swapped();
    let mut unconstrained = Complex64::new(1.0, 0.0);
    let mut leading = Complex64::new(1.0, 0.0);
    for &p in &window.primes {
        let pf = p as f64;
        let b1 = local_b(p, 1, shifts, tol)?;
        let bt1 = local_b(p, 1, &sw, tol)?;
        leading *= 1.0 + alpha * (b1 + bt1) / pf + alpha * alpha / pf;
        let mut b_pows = vec![(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))];
        let mut acc = ComplexSum::new();
        // shells max(a, b) = d
        for d in 0..=MAX_SHELL {
            let mut shell = ComplexSum::new();
            let pairs = (0..=d).map(|y| (d, y)).chain((0..d).map(|x| (x, d)));
            for (x, y) in pairs {
                let c = x.min(y);
                let (dx, dy) = ((x - c) as usize, (y - c) as usize);
                while b_pows.len() <= dx.max(dy) {
                    let e = b_pows.len() as u32;
                    b_pows.push((local_b(p, e, shifts, tol)?, local_b(p, e, &sw, tol)?));
                }
                let w = alpha.powi((x + y) as i32) / (factorial(x) * factorial(y) * pf.powi(d as i32));
                shell.add(w * b_pows[dx].0 * b_pows[dy].1);
            }
            let sv = shell.value();
            acc.add(sv);
            if d >= 2 && sv.norm() <= tol * acc.value().norm() {
                break;
            }
        }
        unconstrained *= acc.value();
    }
    Ok(WindowEuler {
        unconstrained,
        leading,
    })
}
