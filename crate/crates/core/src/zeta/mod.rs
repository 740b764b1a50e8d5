//! Evaluation of ζ on the critical line, in the strip, and near `s = 1`.

mod euler_maclaurin;
mod grid;
mod near_one;
mod riemann_siegel;
mod rs_coeffs;
mod theta;

use num_complex::Complex64;

use crate::error::{LabError, Result};

pub use euler_maclaurin::{zeta_em, EmValue};
pub use grid::{default_spacing, max_spacing, zeta_grid, GridCache, GridMethod, ZetaGrid};
pub use near_one::{zeta_near_one, LaurentValue, STIELTJES};
pub use riemann_siegel::{hardy_z, RiemannSiegel, RS_MIN_HEIGHT};
pub use theta::rs_theta;

pub const MIN_TARGET_ERR: f64 = 1e-12;
pub const MAX_TARGET_ERR: f64 = 1e-3;
pub const MAX_HEIGHT: f64 = 1e8;

/// Where ζ is to be evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EvalPoint {
    Strip(Complex64),
    Line(f64),
}

/// A validated evaluation request.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalRequest {
    pub point: EvalPoint,
    pub target_abs_err: f64,
}

impl EvalRequest {
    pub fn strip(s: Complex64, target_abs_err: f64) -> Result<Self> {
        check_target(target_abs_err)?;
        if !(s.re > 0.0 && s.re < 1.0) {
            return Err(LabError::Domain(format!("Re s = {} outside (0, 1)", s.re)));
        }
        Ok(Self {
            point: EvalPoint::Strip(s),
            target_abs_err,
        })
    }

    pub fn line(t: f64, target_abs_err: f64) -> Result<Self> {
        check_target(target_abs_err)?;
        if !t.is_finite() || t.abs() > MAX_HEIGHT {
            return Err(LabError::Domain(format!("height {t} out of range")));
        }
        Ok(Self {
            point: EvalPoint::Line(t),
            target_abs_err,
        })
    }

    pub fn evaluate(&self) -> Result<Complex64> {
        match self.point {
            EvalPoint::Strip(s) => zeta_strip(s, self.target_abs_err),
            EvalPoint::Line(t) => zeta_strip(Complex64::new(0.5, t), self.target_abs_err),
        }
    }
}

fn check_target(target: f64) -> Result<()> {
    if !(MIN_TARGET_ERR..=MAX_TARGET_ERR).contains(&target) {
        return Err(LabError::InvalidParameter(format!(
            "target_abs_err {target:e} outside [{MIN_TARGET_ERR:e}, {MAX_TARGET_ERR:e}]"
        )));
    }
    Ok(())
}

/// ζ(s) by Euler–Maclaurin with a certified remainder.
///
/// Accepts any `s ≠ 1` with `|Im s| <= 1e8`; the strip is the main use but
/// the contour formulas also need points with `Re s` outside `(0, 1)`.
pub fn zeta_strip(s: Complex64, target_abs_err: f64) -> Result<Complex64> {
    check_target(target_abs_err)?;
    if s.im.abs() > MAX_HEIGHT {
        return Err(LabError::Domain(format!("|Im s| = {} exceeds 1e8", s.im.abs())));
    }
    zeta_em(s, target_abs_err).map(|v| v.value)
}

/// ζ(s) anywhere off the pole: Laurent series when `|s - 1| <= 1/2`,
/// Euler–Maclaurin otherwise.
pub fn zeta(s: Complex64, target_abs_err: f64) -> Result<Complex64> {
    let z = s - 1.0;
    if z.norm() <= 0.5 {
        zeta_near_one(z, target_abs_err).map(|v| v.value)
    } else {
        zeta_strip(s, target_abs_err)
    }
}
