//! The smooth weight Φ and its power moments.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::shifts::ShiftTuple;
use crate::error::{LabError, Result};
use crate::quad::simpson;

/// Smooth weight vanishing outside `(support_lo, support_hi)` and equal to 1
/// on `[plateau_lo, plateau_hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpFunction {
    pub support_lo: f64,
    pub plateau_lo: f64,
    pub plateau_hi: f64,
    pub support_hi: f64,
}

impl Default for BumpFunction {
    fn default() -> Self {
        Self {
            support_lo: 0.5,
            plateau_lo: 1.0,
            plateau_hi: 2.0,
            support_hi: 4.0,
        }
    }
}

fn edge(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// `e(x) / (e(x) + e(1 − x))` with `e(x) = exp(−1/x)`.
pub fn smoothstep(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = edge(x);
        a / (a + edge(1.0 - x))
    }
}

impl BumpFunction {
    pub fn validate(&self) -> Result<()> {
        let ok = 0.0 < self.support_lo
            && self.support_lo < self.plateau_lo
            && self.plateau_lo <= self.plateau_hi
            && self.plateau_hi < self.support_hi;
        if ok {
            Ok(())
        } else {
            Err(LabError::InvalidParameter(format!("bump breakpoints not increasing: {self:?}")))
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.support_lo || x >= self.support_hi {
            0.0
        } else if x < self.plateau_lo {
            smoothstep((x - self.support_lo) / (self.plateau_lo - self.support_lo))
        } else if x <= self.plateau_hi {
            1.0
        } else {
            smoothstep((self.support_hi - x) / (self.support_hi - self.plateau_hi))
        }
    }

    /// `∫ Φ(x) f(x) dx` by Simpson on each smooth piece.
    fn integrate(&self, panels: usize, f: impl Fn(f64) -> f64) -> Result<f64> {
        let pieces = [
            (self.support_lo, self.plateau_lo),
            (self.plateau_lo, self.plateau_hi),
            (self.plateau_hi, self.support_hi),
        ];
        let mut total = 0.0;
        for (a, b) in pieces {
            if b <= a {
                continue;
            }
            let h = (b - a) / panels as f64;
            let ys: Vec<f64> = (0..=panels)
                .map(|i| {
                    let x = if i == panels { b } else { a + i as f64 * h };
                    self.eval(x) * f(x)
                })
                .collect();
            total += simpson(&ys, h)?;
        }
        Ok(total)
    }
}

/// The default weight at `x`.
pub fn phi_bump(x: f64) -> f64 {
    BumpFunction::default().eval(x)
}

/// Power series of `M(s) = ∫ Φ(x) x^s dx` around `s = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct MellinMoments {
    pub bump: BumpFunction,
    /// `μ_k / k!` with `μ_k = ∫ Φ(x) (log x)^k dx`.
    pub scaled: Vec<f64>,
    radius: f64,
}

const MOMENT_COUNT: usize = 96;
const MOMENT_PANELS: usize = 1 << 14;

impl MellinMoments {
    pub fn new(bump: BumpFunction) -> Result<Self> {
        bump.validate()?;
        let mut scaled = Vec::with_capacity(MOMENT_COUNT);
        let mut fact = 1.0;
        for k in 0..MOMENT_COUNT {
            if k > 0 {
                fact *= k as f64;
            }
            let mu = bump.integrate(MOMENT_PANELS, |x| x.ln().powi(k as i32))?;
            scaled.push(mu / fact);
        }
        let log_span = bump.support_lo.ln().abs().max(bump.support_hi.ln().abs());
        Ok(Self {
            bump,
            scaled,
            radius: 16.0 / log_span,
        })
    }

    /// `M(s)`; refuses `|s|` beyond where the truncated series is accurate.
    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        if s.norm() > self.radius {
            return Err(LabError::Domain(format!(
                "|s| = {} beyond the moment series radius {}",
                s.norm(),
                self.radius
            )));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.scaled.iter().rev() {
            acc = acc * s + c;
        }
        Ok(acc)
    }

    /// `∫ Φ(t/T) (t/2π)^{w/2} dt = T (T/2π)^{w/2} M(w/2)`.
    pub fn weight_transform(&self, w: Complex64, t: f64) -> Result<Complex64> {
        let half = 0.5 * w;
        Ok(t * (half * (t / std::f64::consts::TAU).ln()).exp() * self.eval(half)?)
    }
}

/// `∫ Φ(t/T) Π_j (t/2π)^{z_j/2} dt` by direct quadrature with `panels`
/// Simpson panels on each piece of Φ.
pub fn phi_weighted_power_moment(
    bump: &BumpFunction,
    shifts: &ShiftTuple,
    t: f64,
    panels: usize,
) -> Result<Complex64> {
    bump.validate()?;
    if panels < 2 || panels % 2 != 0 {
        return Err(LabError::InvalidParameter(format!("panels = {panels} must be even")));
    }
    let half = 0.5 * shifts.sum();
    let log_scale = (t / std::f64::consts::TAU).ln();
    let f = |x: f64, im: bool| {
        let v = (half * (log_scale + x.ln())).exp();
        if im {
            v.im
        } else {
            v.re
        }
    };
    let re = bump.integrate(panels, |x| f(x, false))?;
    let im = bump.integrate(panels, |x| f(x, true))?;
    Ok(t * Complex64::new(re, im))
}
