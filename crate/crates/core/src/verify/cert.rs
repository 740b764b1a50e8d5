//! Certified bounds on the truncated-exponential remainder.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::partition::PartitionScheme;

/// `ln n!`, exact summation for small `n` and Stirling beyond.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 64 {
        return (2..=n).map(|i| (i as f64).ln()).sum();
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    x * x.ln() - x + 0.5 * (std::f64::consts::TAU * x).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// `ln Σ_{m > M} x^m / m!`.
pub fn ln_exp_tail(x: f64, m_cap: u64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let lx = x.ln();
    let mut m = m_cap + 1;
    let mut lt = m as f64 * lx - ln_factorial(m);
    let mut best = lt;
    // running sum scaled by e^{-best}
    let mut acc = 1.0;
    loop {
        m += 1;
        lt += lx - (m as f64).ln();
        if lt > best {
            acc = acc * (best - lt).exp() + 1.0;
            best = lt;
        } else {
            acc += (lt - best).exp();
        }
        if m as f64 > x && lt - best < -40.0 {
            break;
        }
    }
    best + acc.ln()
}

/// Remainder certificate for one window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaylorCertificate {
    pub j: usize,
    pub p_sum: f64,
    /// `2 c_P P_j`, the largest `|α 𝒫_j(s)|` under the hypothesis.
    pub x: f64,
    pub m_cap: u64,
    /// `ln Σ_{m > M} x^m / m!`.
    pub log_remainder: f64,
    /// `ln e^{-x}`.
    pub log_floor: f64,
    /// `ln((1 − sqrt(1 − e^{-P})) e^{-x})`.
    pub log_allowed: f64,
    pub passed: bool,
    /// Empty window, nothing to certify.
    pub skipped: bool,
}

/// Certificate from raw window data. Passing means the truncation error is
/// small enough that `exp(2α Re 𝒫) <= (1 − e^{-P})^{-1} |𝒩|²` follows for
/// every `|α| <= 2` and every `s` with `|𝒫_j(s)| <= c_P P_j`.
pub fn taylor_certificate(j: usize, p_sum: f64, m_cap: u64, c_p: f64) -> TaylorCertificate {
    if p_sum == 0.0 {
        return TaylorCertificate {
            j,
            p_sum,
            x: 0.0,
            m_cap,
            log_remainder: f64::NEG_INFINITY,
            log_floor: 0.0,
            log_allowed: 0.0,
            passed: true,
            skipped: true,
        };
    }
    let x = 2.0 * c_p * p_sum;
    let log_remainder = ln_exp_tail(x, m_cap);
    let log_floor = -x;
    // 1 − sqrt(1 − e^{-P}) = e^{-P} / (1 + sqrt(1 − e^{-P}))
    let root = (0.5 * (-(-p_sum).exp()).ln_1p()).exp();
    let log_slack = -p_sum - (1.0 + root).ln();
    let log_allowed = log_floor + log_slack;
    TaylorCertificate {
        j,
        p_sum,
        x,
        m_cap,
        log_remainder,
        log_floor,
        log_allowed,
        passed: log_remainder <= log_allowed,
        skipped: false,
    }
}

pub fn taylor_remainder_cert(scheme: &PartitionScheme, j: usize, alpha: f64) -> Result<TaylorCertificate> {
    if !(alpha.abs() <= 2.0) {
        return Err(LabError::Domain(format!("|alpha| = {} exceeds 2", alpha.abs())));
    }
    let w = scheme.window(j)?;
    Ok(taylor_certificate(j, w.p_sum, w.m_cap as u64, scheme.params.c_p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_factorial_matches_direct_sum() {
        for n in [0u64, 1, 5, 63, 64, 100, 1000, 123_456] {
            let direct: f64 = (2..=n).map(|i| (i as f64).ln()).sum();
            assert!((ln_factorial(n) - direct).abs() <= 1e-12 * direct.max(1.0), "n = {n}");
        }
    }

    #[test]
    fn exp_tail_against_direct_sum() {
        for (x, m) in [(0.5f64, 2u64), (5.0, 25), (3.0, 1), (20.0, 10)] {
            let mut direct = 0.0;
            let mut term = 1.0;
            for i in 1..400u64 {
                term *= x / i as f64;
                if i > m {
                    direct += term;
                }
            }
            let got = ln_exp_tail(x, m).exp();
            assert!((got - direct).abs() <= 1e-12 * direct, "x = {x}, M = {m}: {got} vs {direct}");
        }
    }

    #[test]
    fn paper_constants_pass_by_far() {
        let c = taylor_certificate(2, 1e4, 5_000_000, 50.0);
        assert!(c.passed);
        assert!(c.log_remainder < c.log_allowed - 1e6, "{c:?}");
        assert!(c.log_remainder.is_finite());
    }

    #[test]
    fn desk_constants_report_without_failing() {
        // desk-small constants on P = 1/2: x = 2, M = floor(10 · 0.5) = 5
        let c = taylor_certificate(2, 0.5, 5, 2.0);
        assert!(c.log_remainder.is_finite());
        let tail: f64 = (6..60).map(|m| 2f64.powi(m) / (1..=m).map(f64::from).product::<f64>()).sum();
        assert!((c.log_remainder - tail.ln()).abs() < 1e-10);
        assert_eq!(c.passed, c.log_remainder <= c.log_allowed);
        let empty = taylor_certificate(3, 0.0, 0, 2.0);
        assert!(empty.passed && empty.skipped);
    }

    #[test]
    fn no_overflow_up_to_large_p() {
        for p in [1e-3, 1.0, 1e3, 1e6] {
            let c = taylor_certificate(2, p, (500.0 * p) as u64, 50.0);
            assert!(c.log_remainder.is_finite() && c.log_allowed.is_finite(), "{c:?}");
        }
    }
}
