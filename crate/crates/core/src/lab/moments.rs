//! Time-domain moment integrals over `[T, 2T]` on uniform grids.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::meanvalue::mv_exact;
use crate::partition::{product_poly_coeffs, window_n, window_p, PartitionScheme};
use crate::quad::integrate_samples;
use crate::zeta::ZetaGrid;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub value: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub k: f64,
    pub spacing: f64,
    pub richardson_err: f64,
    pub comparator: f64,
    pub ratio: f64,
}

impl MomentEstimate {
    fn new(value: f64, t: f64, k: f64, spacing: f64, richardson_err: f64, comparator: f64) -> Self {
        Self {
            value,
            t,
            k,
            spacing,
            richardson_err,
            comparator,
            ratio: value / comparator,
        }
    }
}

fn check_k(k: f64) -> Result<()> {
    if (0.0..=2.0).contains(&k) {
        Ok(())
    } else {
        Err(LabError::Domain(format!("k = {k} outside [0, 2]")))
    }
}

/// Node range `[i0, i1]` of the grid spanning `[T, 2T]`.
pub fn interval_nodes(grid: &ZetaGrid, t: f64) -> Result<(usize, usize)> {
    match (grid.node_index(t), grid.node_index(2.0 * t)) {
        (Some(a), Some(b)) if b > a => Ok((a, b)),
        _ => Err(LabError::Coverage(format!(
            "grid [{}, {}] step {} lacks nodes at {t} and {}",
            grid.t_start,
            grid.t_end,
            grid.spacing,
            2.0 * t
        ))),
    }
}

/// `I_k(T) = ∫_T^{2T} |ζ(1/2+it)|^{2k} dt`, compared with `T (log T)^{k²}`.
pub fn integrate_moment(k: f64, t: f64, grid: &ZetaGrid) -> Result<MomentEstimate> {
    check_k(k)?;
    let (i0, i1) = interval_nodes(grid, t)?;
    let samples: Vec<f64> = grid.z_values[i0..=i1]
        .iter()
        .map(|z| z.abs().powf(2.0 * k))
        .collect();
    let est = integrate_samples(&samples, grid.spacing)?;
    let comparator = t * t.ln().powf(k * k);
    Ok(MomentEstimate::new(
        est.value,
        t,
        k,
        grid.spacing,
        est.richardson_err,
        comparator,
    ))
}

fn check_cutoff(scheme: &PartitionScheme, v: usize, r: usize) -> Result<f64> {
    if v < 2 || v > scheme.ell + 1 {
        return Err(LabError::InvalidParameter(format!(
            "cutoff v = {v} outside [2, {}]",
            scheme.ell + 1
        )));
    }
    if r == 0 {
        return Ok(if v <= scheme.ell { scheme.window(v)?.p_sum } else { 0.0 });
    }
    let w = scheme.window(v)?;
    if r > w.r_cap {
        return Err(LabError::InvalidParameter(format!(
            "r = {r} exceeds R_{v} = {}",
            w.r_cap
        )));
    }
    Ok(w.p_sum)
}

/// `Π_{2<=j<v} |𝒩_j(s; α)|² · |𝒫_v(s)|^{2r}` on the line.
fn product_modulus_sq(scheme: &PartitionScheme, alpha: f64, v: usize, r: usize, t: f64) -> f64 {
    let s = Complex64::new(0.5, t);
    let mut acc = 1.0;
    for w in &scheme.windows[..v - 2] {
        acc *= window_n(w, s, alpha).norm_sqr();
    }
    if r > 0 {
        acc *= window_p(&scheme.windows[v - 2], s).norm_sqr().powi(r as i32);
    }
    acc
}

fn factorial(r: usize) -> f64 {
    (1..=r).map(|i| i as f64).product()
}

fn poly_samples(
    scheme: &PartitionScheme,
    alpha: f64,
    v: usize,
    r: usize,
    grid: &ZetaGrid,
    range: (usize, usize),
    zeta_power: i32,
) -> Vec<f64> {
    (range.0..=range.1)
        .into_par_iter()
        .map(|i| {
            let z = if zeta_power == 0 { 1.0 } else { grid.z_values[i].powi(zeta_power) };
            z * product_modulus_sq(scheme, alpha, v, r, grid.t(i))
        })
        .collect()
}

/// `∫_T^{2T} Π_{2<=j<v} |𝒩_j(1/2+it; k)|² |𝒫_v(1/2+it)|^{2r} dt`, compared
/// with `T (log T_{v−1})^{k²} r! P_v^r`.
pub fn poly_moment(
    scheme: &PartitionScheme,
    k: f64,
    v: usize,
    r: usize,
    t: f64,
    grid: &ZetaGrid,
) -> Result<MomentEstimate> {
    check_k(k)?;
    let p_v = check_cutoff(scheme, v, r)?;
    let range = interval_nodes(grid, t)?;
    let samples = poly_samples(scheme, k, v, r, grid, range, 0);
    let est = integrate_samples(&samples, grid.spacing)?;
    let comparator = t * scheme.log_tj(v - 1).powf(k * k) * factorial(r) * p_v.powi(r as i32);
    Ok(MomentEstimate::new(
        est.value,
        t,
        k,
        grid.spacing,
        est.richardson_err,
        comparator,
    ))
}

/// The same integral from the materialized coefficients via [`mv_exact`].
pub fn poly_moment_exact(scheme: &PartitionScheme, k: f64, v: usize, r: usize, t: f64) -> Result<f64> {
    check_k(k)?;
    check_cutoff(scheme, v, r)?;
    mv_exact(&product_poly_coeffs(scheme, k, v, r)?, t)
}

/// `∫_T^{2T} |ζ|⁴ Π_{2<=j<v} |𝒩_j(·; k − 2)|² |𝒫_v|^{2r} dt`, compared with
/// `T (log T)⁴ (log T_{v−1})^{k²−4} 18^r r! P_v^r e^{P_v}`.
pub fn twisted_poly_moment(
    scheme: &PartitionScheme,
    k: f64,
    v: usize,
    r: usize,
    t: f64,
    grid: &ZetaGrid,
) -> Result<MomentEstimate> {
    check_k(k)?;
    let p_v = check_cutoff(scheme, v, r)?;
    let range = interval_nodes(grid, t)?;
    let samples = poly_samples(scheme, k - 2.0, v, r, grid, range, 4);
    let est = integrate_samples(&samples, grid.spacing)?;
    let comparator = t
        * t.ln().powi(4)
        * scheme.log_tj(v - 1).powf(k * k - 4.0)
        * 18f64.powi(r as i32)
        * factorial(r)
        * p_v.powi(r as i32)
        * p_v.exp();
    Ok(MomentEstimate::new(
        est.value,
        t,
        k,
        grid.spacing,
        est.richardson_err,
        comparator,
    ))
}

/// `[t log(t/2π) + (2γ − 1) t]` between `T` and `2T`.
pub fn second_moment_main_term(t: f64) -> f64 {
    let f = |x: f64| x * (x / (2.0 * PI)).ln() + (2.0 * EULER_GAMMA - 1.0) * x;
    f(2.0 * t) - f(t)
}

/// `T (log T)⁴ / (2π²)`.
pub fn fourth_moment_leading(t: f64) -> f64 {
    t * t.ln().powi(4) / (2.0 * PI * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::zeta_grid;

    fn grid(t: f64) -> ZetaGrid {
        zeta_grid(t, 2.0 * t, 0.02, 1e-10).unwrap()
    }

    #[test]
    fn zeroth_moment_is_length() {
        let g = grid(1000.0);
        let m = integrate_moment(0.0, 1000.0, &g).unwrap();
        assert!((m.value - 1000.0).abs() <= 1e-12 * 1000.0, "{}", m.value);
        assert_eq!(m.ratio, m.value / 1000.0);
    }

    #[test]
    fn coverage_and_range() {
        let g = grid(1000.0);
        assert!(matches!(integrate_moment(1.0, 900.0, &g), Err(LabError::Coverage(_))));
        assert!(matches!(integrate_moment(2.5, 1000.0, &g), Err(LabError::Domain(_))));
    }

    #[test]
    fn second_moment_near_classical() {
        let t = 1e4;
        let g = zeta_grid(t, 2.0 * t, crate::zeta::default_spacing(2.0 * t), 1e-10).unwrap();
        let m = integrate_moment(1.0, t, &g).unwrap();
        let main = second_moment_main_term(t);
        assert!((m.value / main - 1.0).abs() < 0.05, "{} vs {main}", m.value);
        let m2 = integrate_moment(1.0 + 1e-6, t, &g).unwrap();
        assert!((m2.value - m.value).abs() <= 1e-3 * m.value);
    }

    #[test]
    fn trivial_products() {
        let s = PartitionScheme::from_prime_windows(1e6, 1.0, 6.0, vec![vec![2, 3], vec![5, 7]]).unwrap();
        let g = grid(500.0);
        let m = poly_moment(&s, 1.0, 2, 0, 500.0, &g).unwrap();
        assert!((m.value - 500.0).abs() < 1e-10);
        let a = twisted_poly_moment(&s, 2.0, 2, 0, 500.0, &g).unwrap();
        let b = integrate_moment(2.0, 500.0, &g).unwrap();
        assert_eq!(a.value, b.value);
        assert!(poly_moment(&s, 1.0, 3, 9, 500.0, &g).is_err());
    }

    #[test]
    fn poly_moment_matches_mean_value() {
        let s = PartitionScheme::from_prime_windows(1e6, 1.0, 6.0, vec![vec![2, 3], vec![5, 7]]).unwrap();
        let t = 1e4;
        let g = grid(t);
        for k in [0.5, 1.0, 2.0] {
            let m = poly_moment(&s, k, 3, 1, t, &g).unwrap();
            let exact = poly_moment_exact(&s, k, 3, 1, t).unwrap();
            assert!((m.value / exact - 1.0).abs() < 1e-4, "k = {k}: {} vs {exact}", m.value);
        }
    }
}
