//! The summation budget over the cutoff index `v`, in log space.

use serde::{Deserialize, Serialize};

use super::cert::ln_factorial;
use crate::error::{LabError, Result};
use crate::partition::PartitionScheme;

/// A real number `y = sign · exp(log_abs)`; used for logarithms of
/// quantities like `exp(-e^{10^4})` that no `f64` can hold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BigLog {
    pub sign: i8,
    pub log_abs: f64,
}

impl BigLog {
    pub const ZERO: BigLog = BigLog {
        sign: 0,
        log_abs: f64::NEG_INFINITY,
    };

    pub fn from_f64(y: f64) -> Self {
        if y == 0.0 {
            Self::ZERO
        } else {
            Self {
                sign: if y > 0.0 { 1 } else { -1 },
                log_abs: y.abs().ln(),
            }
        }
    }

    /// `sign · e^{log_abs}`.
    pub fn signed_exp(sign: i8, log_abs: f64) -> Self {
        if sign == 0 {
            Self::ZERO
        } else {
            Self { sign, log_abs }
        }
    }

    /// The value as an `f64`, infinite when out of range.
    pub fn value(&self) -> f64 {
        self.sign as f64 * self.log_abs.exp()
    }

    pub fn neg(self) -> Self {
        Self {
            sign: -self.sign,
            ..self
        }
    }

    pub fn add(self, other: Self) -> Self {
        if self.sign == 0 {
            return other;
        }
        if other.sign == 0 {
            return self;
        }
        let (big, small) = if self.log_abs >= other.log_abs { (self, other) } else { (other, self) };
        let d = (small.log_abs - big.log_abs).exp();
        if big.sign == small.sign {
            Self::signed_exp(big.sign, big.log_abs + d.ln_1p())
        } else if d == 1.0 {
            Self::ZERO
        } else {
            Self::signed_exp(big.sign, big.log_abs + (-d).ln_1p())
        }
    }

    pub fn mul_f64(self, c: f64) -> Self {
        if c == 0.0 || self.sign == 0 {
            return Self::ZERO;
        }
        Self::signed_exp(self.sign * c.signum() as i8, self.log_abs + c.abs().ln())
    }
}

/// `ln(e^a + e^b)` for `a, b` held as [`BigLog`].
fn log_add_exp(a: BigLog, b: BigLog) -> BigLog {
    let (hi, lo) = if a.add(b.neg()).sign >= 0 { (a, b) } else { (b, a) };
    let gap = lo.add(hi.neg()).value();
    if gap < -800.0 || gap.is_nan() {
        hi
    } else {
        hi.add(BigLog::from_f64(gap.exp().ln_1p()))
    }
}

/// One cutoff index of the budget sum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderRung {
    pub v: usize,
    /// `ln P_v`.
    pub ln_p: f64,
    /// `ln(log T / log T_{v−1})`.
    pub log_ratio: BigLog,
    /// `⌈c_P P_v⌉` when representable; otherwise `c_P P_v` is used.
    pub r_exact: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetTerm {
    pub v: usize,
    /// `ln(⌈c_P P⌉! P^{⌈c_P P⌉} / (c_P P)^{2⌈c_P P⌉})`.
    pub ln_first_branch: BigLog,
    /// Same with the extra `18^R e^{P} (log T / log T_{v−1})^4`.
    pub ln_second_branch: BigLog,
    /// `ln` of the whole summand relative to `T (log T)^{k²}`.
    pub ln_term: BigLog,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub k: f64,
    pub c_p: f64,
    /// `1 + Σ_v exp(ln_term)`.
    pub total: f64,
    pub terms: Vec<BudgetTerm>,
}

impl BudgetReport {
    /// Largest `ln_term` as an `f64` (may be `-inf`).
    pub fn max_ln_term(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.ln_term.value())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn rung_term(rung: &LadderRung, k: f64, c_p: f64) -> BudgetTerm {
    let ln_c = c_p.ln();
    let ln_cp_p = ln_c + rung.ln_p;
    let (ln_r_fact, r_big) = match rung.r_exact {
        Some(r) => (BigLog::from_f64(ln_factorial(r)), BigLog::from_f64(r as f64)),
        None => {
            // Stirling with R = c_P P: R (ln R − 1) + ln(2πR)/2
            let r = BigLog::signed_exp(1, ln_cp_p);
            let tail = BigLog::from_f64(0.5 * (std::f64::consts::TAU.ln() + ln_cp_p));
            (r.mul_f64(ln_cp_p - 1.0).add(tail), r)
        }
    };
    // R ln P − 2 R ln(c_P P)
    let powers = r_big.mul_f64(rung.ln_p - 2.0 * ln_cp_p);
    let first = ln_r_fact.add(powers);
    let p_val = BigLog::signed_exp(1, rung.ln_p);
    let second = first
        .add(r_big.mul_f64(18f64.ln()))
        .add(p_val)
        .add(rung.log_ratio.mul_f64(4.0));
    let ln_term = log_add_exp(first, second).add(rung.log_ratio.mul_f64(-k * k));
    BudgetTerm {
        v: rung.v,
        ln_first_branch: first,
        ln_second_branch: second,
        ln_term,
    }
}

/// Budget for arbitrary rungs; used directly for synthetic ladders.
pub fn budget_from_ladder(rungs: &[LadderRung], k: f64, c_p: f64) -> Result<BudgetReport> {
    if !(0.0..=2.0).contains(&k) || !(c_p > 0.0) {
        return Err(LabError::Domain(format!("k = {k}, c_P = {c_p}")));
    }
    let terms: Vec<BudgetTerm> = rungs.iter().map(|r| rung_term(r, k, c_p)).collect();
    let total = 1.0 + terms.iter().map(|t| t.ln_term.value().exp()).sum::<f64>();
    Ok(BudgetReport {
        k,
        c_p,
        total,
        terms,
    })
}

/// Budget for the nonempty windows of a scheme with `ℓ >= 2`.
pub fn theorem_budget(scheme: &PartitionScheme, k: f64) -> Result<BudgetReport> {
    if scheme.ell < 2 {
        return Err(LabError::InvalidParameter(format!("ell = {} < 2", scheme.ell)));
    }
    let log_t = scheme.log_t();
    let rungs: Vec<LadderRung> = scheme
        .windows
        .iter()
        .filter(|w| !w.is_empty())
        .map(|w| LadderRung {
            v: w.j,
            ln_p: w.p_sum.ln(),
            log_ratio: BigLog::from_f64((log_t / scheme.log_tj(w.j - 1)).ln()),
            r_exact: Some(w.r_cap as u64),
        })
        .collect();
    budget_from_ladder(&rungs, k, scheme.params.c_p)
}

/// Rungs with `P_v = e^{10^4}` and `P_v = 10^4`. Since `P_v ≈ 2 log_v T`,
/// the ratio `log T / log T_{v−1} = (log_{v−1} T)²` is taken as `e^{P_v}`.
pub fn paper_ladder() -> Vec<LadderRung> {
    [(2, 1e4), (3, 1e4f64.ln())]
        .into_iter()
        .map(|(v, ln_p)| LadderRung {
            v,
            ln_p,
            log_ratio: BigLog::signed_exp(1, ln_p),
            r_exact: None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{build_partition, PartitionParams};

    #[test]
    fn biglog_arithmetic() {
        let a = BigLog::from_f64(3.0);
        let b = BigLog::from_f64(-5.0);
        assert!((a.add(b).value() + 2.0).abs() < 1e-15);
        assert_eq!(a.add(a.neg()), BigLog::ZERO);
        assert!((a.mul_f64(-2.0).value() + 6.0).abs() < 1e-14);
        let huge = BigLog::signed_exp(-1, 1e4);
        assert_eq!(huge.add(BigLog::from_f64(1e300)), huge);
        let l = log_add_exp(BigLog::from_f64(1.0), BigLog::from_f64(2.0));
        assert!((l.value() - (1f64.exp() + 2f64.exp()).ln()).abs() < 1e-14);
    }

    #[test]
    fn single_window_budget_is_finite() {
        let p = PartitionParams::desk_certified(1e12).with_override(vec![std::f64::consts::E.powi(2), 1000.0]);
        let s = build_partition(&p).unwrap();
        let b = theorem_budget(&s, 1.0).unwrap();
        assert_eq!(b.terms.len(), 1);
        assert!(b.total.is_finite() && b.total > 1.0);
    }

    #[test]
    fn stirling_branch_matches_exact_ceiling() {
        let rung = |r| LadderRung {
            v: 2,
            ln_p: 200f64.ln(),
            log_ratio: BigLog::from_f64(3.0),
            r_exact: r,
        };
        let exact = rung_term(&rung(Some(10_000)), 1.0, 50.0);
        let approx = rung_term(&rung(None), 1.0, 50.0);
        let (x, y) = (exact.ln_term.value(), approx.ln_term.value());
        assert!((x - y).abs() <= 1e-9 * x.abs(), "{x} vs {y}");
    }

    #[test]
    fn paper_ladder_is_negligible() {
        let b = budget_from_ladder(&paper_ladder(), 1.0, 50.0).unwrap();
        assert_eq!(b.total, 1.0);
        for t in &b.terms {
            assert_eq!(t.ln_term.sign, -1);
            assert!(t.ln_term.value() < (1e-100f64).ln(), "{t:?}");
        }
    }

    #[test]
    fn budget_nonincreasing_in_c_p() {
        let p = PartitionParams::desk_certified(1e12).with_override(vec![std::f64::consts::E.powi(2), 50.0, 1000.0]);
        let base = build_partition(&p).unwrap();
        let mut prev = f64::INFINITY;
        for c in (40..=200).step_by(10) {
            let mut s = base.clone();
            s.params.c_p = c as f64;
            for w in &mut s.windows {
                w.r_cap = (c as f64 * w.p_sum).ceil() as usize;
            }
            let b = theorem_budget(&s, 1.0).unwrap();
            assert!(b.max_ln_term() <= prev, "c_P = {c}");
            prev = b.max_ln_term();
        }
    }
}
