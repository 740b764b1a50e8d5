//! The fourfold contour integral for the twisted fourth moment.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::arith::{BCache, LOCAL_TOL};
use super::shifts::{vandermonde, RadiusRule, ShiftTuple};
use super::weight::{BumpFunction, MellinMoments};
use crate::error::{LabError, Result};
use crate::partition::DirichletPoly;
use crate::sum::ComplexSum;
use crate::zeta::zeta;

const ZETA_TARGET: f64 = 1e-12;

/// `(1/2πi) ∮_{|z|=r} f(z) dz` by the `n`-point trapezoid rule.
pub fn circle_integral(r: f64, n: usize, f: impl Fn(Complex64) -> Complex64) -> Complex64 {
    (0..n)
        .map(|k| {
            let z = Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / n as f64);
            f(z) * z
        })
        .collect::<ComplexSum>()
        .value()
        / n as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourConfig {
    pub radius_rule: RadiusRule,
    pub start_nodes: usize,
    pub max_nodes: usize,
    pub rel_tol: f64,
    pub bump: BumpFunction,
}

impl Default for ContourConfig {
    fn default() -> Self {
        Self {
            radius_rule: RadiusRule::Balanced,
            start_nodes: 16,
            max_nodes: 256,
            rel_tol: 1e-4,
            bump: BumpFunction::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourResult {
    pub value: f64,
    pub imag: f64,
    pub nodes: usize,
    pub radii: [f64; 4],
    /// `(nodes per circle, value)` for every doubling step.
    pub history: Vec<(usize, f64)>,
    /// Relative change over the last doubling.
    pub rel_change: f64,
}

fn is_unit_twist(twist: &DirichletPoly) -> bool {
    twist.iter().all(|(n, _)| n == 1)
}

struct Evaluator<'a> {
    twist: &'a DirichletPoly,
    unit_weight: f64,
    t: f64,
    radii: [f64; 4],
    moments: &'a MellinMoments,
}

impl Evaluator<'_> {
    /// `(1/4) (1/N⁴) Σ F Δ(z1,z2,−z3,−z4)² W(Σz) Π z_j^{-3}`.
    fn at_nodes(&self, n: usize) -> Result<Complex64> {
        let circle: Vec<Vec<Complex64>> = self
            .radii
            .iter()
            .map(|&r| {
                (0..n)
                    .map(|k| Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / n as f64))
                    .collect()
            })
            .collect();
        let one = Complex64::new(1.0, 0.0);
        let pair = |a: usize, b: usize| -> Result<Vec<Complex64>> {
            let mut out = Vec::with_capacity(n * n);
            for za in &circle[a] {
                for zb in &circle[b] {
                    out.push(zeta(one + za + zb, ZETA_TARGET)?);
                }
            }
            Ok(out)
        };
        let (z13, z14, z23, z24) = (pair(0, 2)?, pair(0, 3)?, pair(1, 2)?, pair(1, 3)?);
        let rows: Vec<Result<Complex64>> = (0..n)
            .into_par_iter()
            .map(|k1| {
                let mut acc = ComplexSum::new();
                let z1 = circle[0][k1];
                for k2 in 0..n {
                    let z2 = circle[1][k2];
                    for k3 in 0..n {
                        let z3 = circle[2][k3];
                        let a_part = z13[k1 * n + k3] * z23[k2 * n + k3];
                        for k4 in 0..n {
                            let z4 = circle[3][k4];
                            let w = z1 + z2 + z3 + z4;
                            let a = a_part * z14[k1 * n + k4] * z24[k2 * n + k4]
                                / zeta(2.0 * one + w, ZETA_TARGET)?;
                            let g = if self.unit_weight.is_nan() {
                                let s = ShiftTuple {
                                    z: [z1, z2, z3, z4],
                                    radii: self.radii,
                                };
                                BCache::new(&s, LOCAL_TOL).pair_sum(self.twist)?
                            } else {
                                Complex64::new(self.unit_weight, 0.0)
                            };
                            let d = vandermonde([z1, z2, -z3, -z4]);
                            let weight = self.moments.weight_transform(w, self.t)?;
                            let zz = z1 * z2 * z3 * z4;
                            acc.add(a * g * d * d * weight / (zz * zz * zz));
                        }
                    }
                }
                Ok(acc.value())
            })
            .collect();
        let mut total = ComplexSum::new();
        for r in rows {
            total.add(r?);
        }
        let n4 = (n as f64).powi(4);
        Ok(total.value() / (4.0 * n4))
    }
}

/// Main term of the twisted fourth moment as a fourfold contour integral,
/// doubling the nodes per circle until successive values agree.
pub fn prop3_main_term(twist: &DirichletPoly, t: f64, config: &ContourConfig) -> Result<ContourResult> {
    if config.start_nodes < 16 || !config.start_nodes.is_power_of_two() {
        return Err(LabError::InvalidParameter(format!(
            "start_nodes = {} must be a power of two >= 16",
            config.start_nodes
        )));
    }
    if !(t > std::f64::consts::TAU) {
        return Err(LabError::Domain(format!("T = {t}")));
    }
    if twist.is_empty() {
        return Err(LabError::InvalidParameter("empty twist".into()));
    }
    let moments = MellinMoments::new(config.bump)?;
    let unit = is_unit_twist(twist);
    let radii = config.radius_rule.radii(t.ln(), !unit);
    let ev = Evaluator {
        twist,
        unit_weight: if unit { twist.coeff(1).norm_sqr() } else { f64::NAN },
        t,
        radii,
        moments: &moments,
    };
    let mut history = Vec::new();
    let mut n = config.start_nodes;
    let mut prev = ev.at_nodes(n)?;
    history.push((n, prev.re));
    while 2 * n <= config.max_nodes {
        n *= 2;
        let cur = ev.at_nodes(n)?;
        history.push((n, cur.re));
        let rel_change = (cur.re - prev.re).abs() / cur.re.abs();
        if rel_change <= config.rel_tol {
            if cur.im.abs() > 1e-3 * cur.norm() {
                return Err(LabError::Accuracy {
                    target: 1e-3,
                    achieved: cur.im.abs() / cur.norm(),
                    context: format!("imaginary residue of the contour value at {n} nodes"),
                });
            }
            return Ok(ContourResult {
                value: cur.re,
                imag: cur.im,
                nodes: n,
                radii,
                history,
                rel_change,
            });
        }
        prev = cur;
    }
    let last = history[history.len() - 1].1;
    let previous = if history.len() > 1 { history[history.len() - 2].1 } else { last };
    Err(LabError::NotConverged {
        nodes: n,
        previous,
        last,
    })
}
