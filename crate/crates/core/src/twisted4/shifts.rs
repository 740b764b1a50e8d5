//! Shift tuples, divisor sums and the Vandermonde factor.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{LabError, Result};

/// How the contour radii depend on `log T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RadiusRule {
    /// `3^j / log T`.
    Paper,
    /// `(4 + j) / log T`, shrunk until `Σ r_j <= 2.5` and, for nontrivial
    /// twists, `r_2 + r_4 <= 0.9`.
    Balanced,
}

impl RadiusRule {
    pub fn radii(self, log_t: f64, twisted: bool) -> [f64; 4] {
        match self {
            RadiusRule::Paper => {
                [1, 2, 3, 4].map(|j| 3f64.powi(j) / log_t)
            }
            RadiusRule::Balanced => {
                let mut r = [1, 2, 3, 4].map(|j| (4 + j) as f64 / log_t);
                let total: f64 = r.iter().sum();
                let mut scale = (2.5 / total).min(1.0);
                if twisted {
                    scale = scale.min(0.9 / (r[1] + r[3]));
                }
                for x in &mut r {
                    *x *= scale;
                }
                r
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftTuple {
    pub z: [Complex64; 4],
    pub radii: [f64; 4],
}

impl ShiftTuple {
    pub fn new(z: [Complex64; 4]) -> Self {
        Self {
            z,
            radii: z.map(|x| x.norm()),
        }
    }

    pub fn real(z: [f64; 4]) -> Self {
        Self::new(z.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn zero() -> Self {
        Self::real([0.0; 4])
    }

    /// `z_j = r_j e^{i φ_j}`.
    pub fn on_circles(radii: [f64; 4], angles: [f64; 4]) -> Self {
        let mut z = [Complex64::new(0.0, 0.0); 4];
        for j in 0..4 {
            z[j] = Complex64::from_polar(radii[j], angles[j]);
        }
        Self { z, radii }
    }

    /// Node `k_j` of `n` equally spaced points on circle `j`.
    pub fn node(radii: [f64; 4], k: [usize; 4], n: usize) -> Self {
        Self::on_circles(radii, k.map(|i| TAU * i as f64 / n as f64))
    }

    /// `(z3, z4, z1, z2)`.
    pub fn swapped(&self) -> Self {
        let [a, b, c, d] = self.z;
        let [ra, rb, rc, rd] = self.radii;
        Self {
            z: [c, d, a, b],
            radii: [rc, rd, ra, rb],
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            z: self.z.map(|x| x.conj()),
            radii: self.radii,
        }
    }

    pub fn sum(&self) -> Complex64 {
        self.z.iter().sum()
    }

    /// The four sums `z_i + z_j` (`i ∈ {1,2}`, `j ∈ {3,4}`) that appear in
    /// `ζ(1 + z_i + z_j)`.
    pub fn cross_sums(&self) -> [Complex64; 4] {
        let [a, b, c, d] = self.z;
        [a + c, a + d, b + c, b + d]
    }

    pub fn check_poles(&self) -> Result<()> {
        for (w, name) in self.cross_sums().iter().zip(["z1+z3", "z1+z4", "z2+z3", "z2+z4"]) {
            if w.norm() < 1e-12 {
                return Err(LabError::Domain(format!("pole guard: {name} = {w}")));
            }
        }
        Ok(())
    }
}

/// `Σ_{n1 n2 = n} n1^{-z1} n2^{-z2}`.
pub fn sigma_z(n: u64, z1: Complex64, z2: Complex64) -> Complex64 {
    assert!(n >= 1, "sigma_z needs n >= 1");
    let mut acc = Complex64::new(1.0, 0.0);
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            acc *= sigma_prime_power(p, e, z1, z2);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        acc *= sigma_prime_power(m, 1, z1, z2);
    }
    acc
}

/// `σ(p^e) = Σ_{a+b=e} x^a y^b` with `x = p^{-z1}`, `y = p^{-z2}`.
pub(crate) fn sigma_prime_power(p: u64, e: u32, z1: Complex64, z2: Complex64) -> Complex64 {
    let lp = (p as f64).ln();
    let x = (-z1 * lp).exp();
    let y = (-z2 * lp).exp();
    let mut s = Complex64::new(1.0, 0.0);
    let mut xe = Complex64::new(1.0, 0.0);
    for _ in 0..e {
        xe *= x;
        s = y * s + xe;
    }
    s
}

/// `Π_{i<j} (z_j − z_i)`.
pub fn vandermonde(z: [Complex64; 4]) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for i in 0..4 {
        for j in i + 1..4 {
            acc *= z[j] - z[i];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sigma_examples() {
        let z0 = c(0.0, 0.0);
        for (n, d) in [(8, 4.0), (9, 3.0), (12, 6.0), (1, 1.0), (97, 2.0)] {
            assert_eq!(sigma_z(n, z0, z0), c(d, 0.0), "n = {n}");
        }
        let (z1, z2) = (c(0.1, 0.3), c(-0.2, 0.05));
        assert_eq!(sigma_z(1, z1, z2), c(1.0, 0.0));
        let p = 7.0f64;
        let want = (-z1 * p.ln()).exp() + (-z2 * p.ln()).exp();
        assert!((sigma_z(7, z1, z2) - want).norm() < 1e-15);
        let brute: Complex64 = [1u64, 2, 3, 4, 6, 12]
            .iter()
            .map(|&d| (-z1 * (d as f64).ln()).exp() * (-z2 * ((12 / d) as f64).ln()).exp())
            .sum();
        assert!((sigma_z(12, z1, z2) - brute).norm() < 1e-14);
    }

    #[test]
    fn vandermonde_examples() {
        let r = |xs: [f64; 4]| xs.map(|x| c(x, 0.0));
        assert_eq!(vandermonde(r([0.0, 1.0, 2.0, 3.0])), c(12.0, 0.0));
        assert_eq!(vandermonde(r([0.0, 1.0, 1.0, 3.0])), c(0.0, 0.0));
        let z = [c(0.1, 0.2), c(-0.3, 0.1), c(0.5, -0.4), c(0.2, 0.9)];
        let swapped = [z[1], z[0], z[2], z[3]];
        assert!((vandermonde(z) + vandermonde(swapped)).norm() < 1e-15);
    }

    #[test]
    fn radius_rules() {
        let log_t = 100.0f64.ln() * 5.0;
        let p = RadiusRule::Paper.radii(log_t, false);
        assert!((p[3] - 81.0 / log_t).abs() < 1e-15);
        let b = RadiusRule::Balanced.radii(11.5, true);
        assert!(b.iter().sum::<f64>() <= 2.5 + 1e-12);
        assert!(b[1] + b[3] <= 0.9 + 1e-12);
        assert!(b.windows(2).all(|w| w[0] < w[1]));
        let b = RadiusRule::Balanced.radii(1000.0, false);
        assert!((b[0] - 5e-3).abs() < 1e-15);
    }

    #[test]
    fn pole_guard() {
        let s = ShiftTuple::real([0.1, 0.2, -0.1, 0.3]);
        assert!(matches!(s.check_poles(), Err(LabError::Domain(_))));
        assert!(ShiftTuple::real([0.1, 0.2, 0.3, 0.4]).check_poles().is_ok());
        let sw = s.swapped();
        assert_eq!(sw.z[0], s.z[2]);
        assert_eq!(sw.swapped(), s);
    }
}
