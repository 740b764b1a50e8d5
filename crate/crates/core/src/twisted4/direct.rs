//! The twisted fourth moment integrated directly on a zeta grid.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::weight::BumpFunction;
use crate::error::{LabError, Result};
use crate::partition::DirichletPoly;
use crate::quad::integrate_samples;
use crate::zeta::ZetaGrid;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weight {
    /// `Φ(t/T)` over its support.
    Bump(BumpFunction),
    /// The indicator of `[T, 2T]`.
    Indicator,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistedIntegral {
    pub value: f64,
    pub richardson_err: f64,
    pub samples: usize,
}

const CHUNK: usize = 4096;

/// `∫ |ζ(1/2+it)|⁴ |Σ a(n) n^{-1/2-it}|² w(t) dt` by composite quadrature
/// on the grid nodes.
pub fn direct_twisted_integral(
    twist: &DirichletPoly,
    t: f64,
    grid: &ZetaGrid,
    weight: Weight,
) -> Result<TwistedIntegral> {
    let h = grid.spacing;
    let (i0, i1) = match weight {
        Weight::Indicator => {
            let lo = grid.node_index(t);
            let hi = grid.node_index(2.0 * t);
            match (lo, hi) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    return Err(LabError::Coverage(format!(
                        "grid [{}, {}] step {h} lacks nodes at {t} and {}",
                        grid.t_start,
                        grid.t_end,
                        2.0 * t
                    )))
                }
            }
        }
        Weight::Bump(b) => {
            b.validate()?;
            let (lo, hi) = (b.support_lo * t, b.support_hi * t);
            let slack = 1e-9 * hi;
            if grid.t_start > lo + slack || grid.t_end < hi - slack || grid.is_empty() {
                return Err(LabError::Coverage(format!(
                    "grid [{}, {}] does not cover [{lo}, {hi}]",
                    grid.t_start, grid.t_end
                )));
            }
            let a = ((lo - grid.t_start) / h).floor().max(0.0) as usize;
            let b = (((hi - grid.t_start) / h).ceil() as usize).min(grid.len() - 1);
            (a, b)
        }
    };
    let terms: Vec<(f64, Complex64)> = twist
        .iter()
        .map(|(n, a)| ((n as f64).ln(), a / (n as f64).sqrt()))
        .collect();
    let unit = terms.len() == 1 && terms[0].0 == 0.0;
    let mut samples = vec![0.0; i1 - i0 + 1];
    samples.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
        for (k, out) in chunk.iter_mut().enumerate() {
            let i = i0 + c * CHUNK + k;
            let ti = grid.t(i);
            let w = match weight {
                Weight::Indicator => 1.0,
                Weight::Bump(b) => b.eval(ti / t),
            };
            if w == 0.0 {
                *out = 0.0;
                continue;
            }
            let z2 = grid.z_values[i] * grid.z_values[i];
            let tw = if unit {
                terms[0].1.norm_sqr()
            } else {
                terms
                    .iter()
                    .map(|&(ln_n, b)| b * Complex64::from_polar(1.0, -ti * ln_n))
                    .sum::<Complex64>()
                    .norm_sqr()
            };
            *out = z2 * z2 * tw * w;
        }
    });
    let est = integrate_samples(&samples, h)?;
    Ok(TwistedIntegral {
        value: est.value,
        richardson_err: est.richardson_err,
        samples: samples.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::zeta_grid;

    #[test]
    fn unit_twist_positive_and_refusals() {
        let grid = zeta_grid(500.0, 4000.0, 0.02, 1e-8).unwrap();
        let one = DirichletPoly::one();
        let ind = direct_twisted_integral(&one, 1000.0, &grid, Weight::Indicator).unwrap();
        assert!(ind.value > 0.0);
        let bump = direct_twisted_integral(&one, 1000.0, &grid, Weight::Bump(Default::default()))
            .unwrap();
        assert!(bump.value > ind.value);
        assert!(direct_twisted_integral(&one, 1001.0, &grid, Weight::Bump(Default::default()))
            .is_err());
        assert!(direct_twisted_integral(&one, 1000.005, &grid, Weight::Indicator).is_err());
    }

    #[test]
    fn twist_two_is_half_plus_oscillation() {
        let grid = zeta_grid(500.0, 4000.0, 0.02, 1e-8).unwrap();
        let w = Weight::Bump(Default::default());
        let one = direct_twisted_integral(&DirichletPoly::one(), 1000.0, &grid, w).unwrap();
        let two = DirichletPoly::from_real([(2, 1.0)]).unwrap();
        let v = direct_twisted_integral(&two, 1000.0, &grid, w).unwrap();
        assert!((v.value - 0.5 * one.value).abs() <= 1e-12 * one.value);
    }
}
