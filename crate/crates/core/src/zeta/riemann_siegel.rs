//! Hardy's Z function by the Riemann–Siegel formula.
//!
//! The main sum is followed by the corrections C_0..C_4. Gabcke's bounds put
//! the remainder after C_4 near `0.017·t^{-11/4}`, which is below 1e-6 for
//! `t >= 40`; below [`RS_MIN_HEIGHT`] the evaluator switches to
//! Euler–Maclaurin so the 1e-6 target holds over the whole range.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::euler_maclaurin::zeta_em;
use super::rs_coeffs::{C0, C1, C2, C3, C4};
use super::theta::{rs_theta, theta_unchecked};
use crate::error::{LabError, Result};

/// Heights below this are evaluated through Euler–Maclaurin.
pub const RS_MIN_HEIGHT: f64 = 40.0;

const EM_FALLBACK_ERR: f64 = 1e-9;

#[inline]
fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc.mul_add(x, c))
}

/// `τ^{-1/2} Σ_k C_k(p) τ^{-k}` with `τ = sqrt(t/2π)`.
#[inline]
fn correction(p: f64, tau: f64) -> f64 {
    let x = p - 0.5;
    let inv_tau = 1.0 / tau;
    let mut acc = horner(&C4, x);
    acc = acc.mul_add(inv_tau, horner(&C3, x));
    acc = acc.mul_add(inv_tau, horner(&C2, x));
    acc = acc.mul_add(inv_tau, horner(&C1, x));
    acc = acc.mul_add(inv_tau, horner(&C0, x));
    acc * inv_tau.sqrt()
}

/// Precomputed `ln n` and `n^{-1/2}` for main sums up to a fixed height.
#[derive(Clone, Debug)]
pub struct RiemannSiegel {
    ln_n: Vec<f64>,
    inv_sqrt_n: Vec<f64>,
}

impl RiemannSiegel {
    /// Evaluator whose tables cover every `t <= t_max`.
    pub fn new(t_max: f64) -> Self {
        let n_max = (t_max / (2.0 * PI)).sqrt().floor() as usize + 1;
        let ln_n = (1..=n_max).map(|n| (n as f64).ln()).collect();
        let inv_sqrt_n = (1..=n_max).map(|n| 1.0 / (n as f64).sqrt()).collect();
        Self { ln_n, inv_sqrt_n }
    }

    /// `(Z(t), θ(t))`.
    pub fn z_and_theta(&self, t: f64) -> Result<(f64, f64)> {
        if !(t >= 10.0) {
            return Err(LabError::Domain(format!("hardy_z needs t >= 10, got {t}")));
        }
        let theta = theta_unchecked(t);
        if t < RS_MIN_HEIGHT {
            let zeta = zeta_em(Complex64::new(0.5, t), EM_FALLBACK_ERR)?.value;
            let z = (Complex64::from_polar(1.0, theta) * zeta).re;
            return Ok((z, theta));
        }
        let tau = (t / (2.0 * PI)).sqrt();
        let n = tau.floor() as usize;
        if n > self.ln_n.len() {
            let own = RiemannSiegel::new(t);
            return own.z_and_theta(t);
        }
        let mut main = 0.0;
        for k in 0..n {
            main += self.inv_sqrt_n[k] * (theta - t * self.ln_n[k]).cos();
        }
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        let rem = sign * correction(tau - n as f64, tau);
        Ok((2.0 * main + rem, theta))
    }
}

/// Hardy's Z(t) for `t >= 10`.
pub fn hardy_z(t: f64) -> Result<f64> {
    rs_theta(t)?;
    RiemannSiegel::new(t).z_and_theta(t).map(|(z, _)| z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_changes_at_first_two_zeros() {
        assert!(hardy_z(14.0).unwrap() * hardy_z(14.3).unwrap() < 0.0);
        assert!(hardy_z(20.9).unwrap() * hardy_z(21.1).unwrap() < 0.0);
    }

    #[test]
    fn rejects_small_heights() {
        assert!(hardy_z(5.0).is_err());
    }

    #[test]
    fn correction_at_half_is_cos_pi_over_eight() {
        // C_0(1/2) = Ψ(1/2) = cos(3π/8)
        assert!((horner(&C0, 0.0) - (3.0 * PI / 8.0).cos()).abs() < 1e-15);
    }
}

#[cfg(test)]
mod agreement {
    use super::*;
    use num_complex::Complex64;

    fn em_z(t: f64) -> f64 {
        let zeta = zeta_em(Complex64::new(0.5, t), 1e-11).unwrap().value;
        (Complex64::from_polar(1.0, theta_unchecked(t)) * zeta).re
    }

    #[test]
    fn agrees_with_euler_maclaurin_on_a_sweep() {
        let rs = RiemannSiegel::new(2e4);
        let mut t = 10.0;
        while t < 2e4 {
            let e = (rs.z_and_theta(t).unwrap().0 - em_z(t)).abs();
            assert!(e < 1e-6, "t = {t}: |RS - EM| = {e:e}");
            t *= 1.0137;
        }
    }
}
