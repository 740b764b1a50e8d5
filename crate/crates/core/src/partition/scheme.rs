use std::f64::consts::E;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::sieve::sieve_primes;
use crate::error::{LabError, Result};
use crate::sum::NeumaierSum;

/// Windows with at most this many primes get exact rational ceilings.
const EXACT_CEIL_PRIMES: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionMode {
    Paper,
    Desk,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionParams {
    #[serde(rename = "T")]
    pub t: f64,
    pub theta_min: f64,
    #[serde(rename = "c_P")]
    pub c_p: f64,
    #[serde(rename = "c_Omega")]
    pub c_omega: f64,
    #[serde(default)]
    pub explicit_tj_override: Option<Vec<f64>>,
    pub mode: PartitionMode,
}

impl PartitionParams {
    /// Constants `(10^4, 50, 500)`.
    pub fn paper(t: f64) -> Self {
        Self {
            t,
            theta_min: 1e4,
            c_p: 50.0,
            c_omega: 500.0,
            explicit_tj_override: None,
            mode: PartitionMode::Paper,
        }
    }

    /// The `desk-small` preset `(1.5, 2, 10)`.
    pub fn desk_small(t: f64) -> Self {
        Self {
            t,
            theta_min: 1.5,
            c_p: 2.0,
            c_omega: 10.0,
            explicit_tj_override: None,
            mode: PartitionMode::Desk,
        }
    }

    /// Desk preset `(1.5, 5, 50)`, for which the Taylor certificates pass on
    /// windows of moderate prime sums.
    pub fn desk_certified(t: f64) -> Self {
        Self {
            c_p: 5.0,
            c_omega: 50.0,
            ..Self::desk_small(t)
        }
    }

    pub fn with_override(mut self, tj: Vec<f64>) -> Self {
        self.explicit_tj_override = Some(tj);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(LabError::InvalidParameter(m));
        if !(self.t >= 10.0) || !self.t.is_finite() {
            return bad(format!("T = {} must be finite and >= 10", self.t));
        }
        if !(self.theta_min > 1.0) {
            return bad(format!("theta_min = {} must exceed 1", self.theta_min));
        }
        if !(self.c_p > 0.0) || !(self.c_omega > 0.0) {
            return bad(format!(
                "need c_P > 0 and c_Omega > 0, got c_P = {}, c_Omega = {}",
                self.c_p, self.c_omega
            ));
        }
        // desk-small (c_P = 2, c_Omega = 10) sits below this ratio
        if self.mode == PartitionMode::Paper && !(self.c_omega >= 10.0 * self.c_p) {
            return bad(format!(
                "paper mode needs c_Omega >= 10 c_P, got c_P = {}, c_Omega = {}",
                self.c_p, self.c_omega
            ));
        }
        if let Some(tj) = &self.explicit_tj_override {
            if tj.is_empty() || (tj[0] - E * E).abs() > 1e-9 {
                return bad("override list must start at e^2".into());
            }
            if tj.windows(2).any(|w| !(w[1] > w[0])) {
                return bad("override list must be strictly increasing".into());
            }
        }
        Ok(())
    }
}

/// One prime window `[lo, hi)` and its derived quantities.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    /// Index `j >= 2`.
    pub j: usize,
    pub lo: f64,
    pub hi: f64,
    pub primes: Vec<u64>,
    /// `Σ 1/p` over the window.
    pub p_sum: f64,
    /// Truncation of `𝒩_j`: terms with `Ω(n) <= m_cap`.
    pub m_cap: usize,
    /// Exponent `⌈c_P P_j⌉` of the `𝒫_j` power.
    pub r_cap: usize,
}

impl Window {
    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn exact_p_sum(&self) -> BigRational {
        exact_reciprocal_sum(&self.primes)
    }
}

pub fn exact_reciprocal_sum(primes: &[u64]) -> BigRational {
    primes.iter().fold(BigRational::from_integer(BigInt::from(0)), |acc, &p| {
        acc + BigRational::new(BigInt::from(1), BigInt::from(p))
    })
}

fn compensated_p_sum(primes: &[u64]) -> f64 {
    primes.iter().map(|&p| 1.0 / p as f64).collect::<NeumaierSum>().value()
}

/// `⌊c·P⌋` and `⌈c·P⌉`, exactly when the window is small.
fn floor_ceil(c: f64, primes: &[u64], p_sum: f64) -> (usize, usize) {
    if primes.len() <= EXACT_CEIL_PRIMES {
        if let Some(cr) = BigRational::from_f64(c) {
            let x = cr * exact_reciprocal_sum(primes);
            let fl = x.floor().to_integer().to_usize().unwrap_or(usize::MAX);
            let ce = x.ceil().to_integer().to_usize().unwrap_or(usize::MAX);
            return (fl, ce);
        }
    }
    let x = c * p_sum;
    (x.floor() as usize, x.ceil() as usize)
}

/// Iterated logarithm `log_j x`; `None` once an argument is non-positive.
pub fn iterated_log(x: f64, j: usize) -> Option<f64> {
    let mut v = x;
    for _ in 0..j {
        if !(v > 0.0) {
            return None;
        }
        v = v.ln();
    }
    Some(v)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartitionScheme {
    pub params: PartitionParams,
    pub ell: usize,
    /// `T_1 = e², …, T_ell`.
    pub tj: Vec<f64>,
    /// Windows `j = 2..=ell`, stored at `j - 2`.
    pub windows: Vec<Window>,
    /// Set when `T_ell > T^{1/10}`.
    pub length_warning: bool,
}

impl PartitionScheme {
    pub fn window(&self, j: usize) -> Result<&Window> {
        if j < 2 || j > self.ell {
            return Err(LabError::InvalidParameter(format!(
                "window index {j} outside [2, {}]",
                self.ell
            )));
        }
        Ok(&self.windows[j - 2])
    }

    pub fn log_t(&self) -> f64 {
        self.params.t.ln()
    }

    /// `log T_{j}` for `1 <= j <= ell`.
    pub fn log_tj(&self, j: usize) -> f64 {
        self.tj[j - 1].ln()
    }

    /// Natural log of the largest index in `Π_j 𝒩_j`, i.e. its length.
    pub fn log_length(&self) -> f64 {
        self.windows
            .iter()
            .filter_map(|w| w.primes.last().map(|&p| w.m_cap as f64 * (p as f64).ln()))
            .sum()
    }

    /// Scheme over explicitly given prime windows (numbered from `j = 2`),
    /// for small synthetic instances. Boundaries are `[min p, max p + 1)`.
    pub fn from_prime_windows(t: f64, c_p: f64, c_omega: f64, windows: Vec<Vec<u64>>) -> Result<Self> {
        let params = PartitionParams {
            t,
            theta_min: 1.5,
            c_p,
            c_omega,
            explicit_tj_override: None,
            mode: PartitionMode::Desk,
        };
        if !(c_p > 0.0 && c_omega > 0.0) {
            return Err(LabError::InvalidParameter("constants must be positive".into()));
        }
        let mut tj = vec![E * E];
        let mut ws = Vec::with_capacity(windows.len());
        for (i, mut primes) in windows.into_iter().enumerate() {
            primes.sort_unstable();
            primes.dedup();
            let lo = primes.first().map_or(*tj.last().unwrap(), |&p| p as f64);
            let hi = primes.last().map_or(lo + 1.0, |&p| p as f64 + 1.0);
            tj.push(hi);
            ws.push(make_window(i + 2, lo, hi, primes, c_p, c_omega));
        }
        Ok(Self {
            params,
            ell: ws.len() + 1,
            tj,
            windows: ws,
            length_warning: false,
        })
    }

    /// Override the `𝒩_j` truncation of one window.
    pub fn with_truncation(mut self, j: usize, m_cap: usize) -> Result<Self> {
        self.window(j)?;
        self.windows[j - 2].m_cap = m_cap;
        Ok(self)
    }

    pub fn export(&self) -> SchemeExport {
        SchemeExport {
            mode: self.params.mode,
            t: self.params.t,
            theta_min: self.params.theta_min,
            c_p: self.params.c_p,
            c_omega: self.params.c_omega,
            tj: self.tj.clone(),
            pj: self.windows.iter().map(|w| w.p_sum).collect(),
            mj: self.windows.iter().map(|w| w.m_cap).collect(),
            rj: self.windows.iter().map(|w| w.r_cap).collect(),
            window_prime_counts: self.windows.iter().map(|w| w.primes.len()).collect(),
        }
    }
}

fn make_window(j: usize, lo: f64, hi: f64, primes: Vec<u64>, c_p: f64, c_omega: f64) -> Window {
    let p_sum = compensated_p_sum(&primes);
    let (m_cap, _) = floor_ceil(c_omega, &primes, p_sum);
    let (_, r_cap) = floor_ceil(c_p, &primes, p_sum);
    Window {
        j,
        lo,
        hi,
        primes,
        p_sum,
        m_cap,
        r_cap,
    }
}

/// JSON export of a scheme.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeExport {
    pub mode: PartitionMode,
    #[serde(rename = "T")]
    pub t: f64,
    pub theta_min: f64,
    #[serde(rename = "c_P")]
    pub c_p: f64,
    #[serde(rename = "c_Omega")]
    pub c_omega: f64,
    #[serde(rename = "Tj")]
    pub tj: Vec<f64>,
    #[serde(rename = "Pj")]
    pub pj: Vec<f64>,
    #[serde(rename = "Mj")]
    pub mj: Vec<usize>,
    #[serde(rename = "Rj")]
    pub rj: Vec<usize>,
    pub window_prime_counts: Vec<usize>,
}

/// Build the prime-window scheme.
///
/// `ell` is the largest integer with `log_ell T >= theta_min`, and
/// `T_j = exp(log T / (log_j T)^2)` for `2 <= j <= ell`, unless an explicit
/// list of boundaries is supplied.
pub fn build_partition(params: &PartitionParams) -> Result<PartitionScheme> {
    params.validate()?;
    let t = params.t;
    let tj = match &params.explicit_tj_override {
        Some(list) => list.clone(),
        None => {
            let mut ell = 0;
            while let Some(v) = iterated_log(t, ell + 1) {
                if v >= params.theta_min {
                    ell += 1;
                } else {
                    break;
                }
            }
            if params.mode == PartitionMode::Paper && ell < 2 {
                return Err(LabError::PaperModeInfeasible(format!(
                    "log_2 T = {:.4} < theta_min = {}; ell = {ell}",
                    iterated_log(t, 2).unwrap_or(f64::NAN),
                    params.theta_min
                )));
            }
            let ell = ell.max(1);
            let log_t = t.ln();
            let mut tj = vec![E * E];
            for j in 2..=ell {
                let lj = iterated_log(t, j).expect("ell bounds the iterated logs");
                tj.push((log_t / (lj * lj)).exp());
            }
            if tj.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(LabError::InvalidParameter(format!(
                    "boundaries not increasing at T = {t}: {tj:?}"
                )));
            }
            tj
        }
    };
    let ell = tj.len();
    let mut windows = Vec::with_capacity(ell.saturating_sub(1));
    for j in 2..=ell {
        let (lo, hi) = (tj[j - 2], tj[j - 1]);
        let primes = sieve_primes(lo.max(2.0), hi)?;
        windows.push(make_window(j, lo, hi, primes, params.c_p, params.c_omega));
    }
    let length_warning = *tj.last().unwrap() > t.powf(0.1);
    Ok(PartitionScheme {
        params: params.clone(),
        ell,
        tj,
        windows,
        length_warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_scheme_at_1e10() {
        let s = build_partition(&PartitionParams::desk_small(1e10)).unwrap();
        assert_eq!(s.ell, 2);
        assert_eq!(s.tj[0], E * E);
        // log T = 23.02585, log_2 T = 3.13664, T_2 = exp(23.02585 / 9.83851)
        assert!((s.tj[1] - 10.3861).abs() < 1e-3, "{}", s.tj[1]);
        let w = s.window(2).unwrap();
        assert!(w.is_empty());
        assert_eq!(w.p_sum, 0.0);
        assert_eq!(w.m_cap, 0);
    }

    #[test]
    fn override_windows() {
        let p = PartitionParams::desk_small(1e6).with_override(vec![E * E, 10.0, 100.0]);
        let s = build_partition(&p).unwrap();
        assert_eq!(s.ell, 3);
        assert!(s.window(2).unwrap().is_empty());
        let w3 = s.window(3).unwrap();
        assert_eq!(w3.primes.first(), Some(&11));
        assert_eq!(w3.primes.last(), Some(&97));
        assert_eq!(w3.primes.len(), 21);
    }

    #[test]
    fn paper_mode_is_infeasible() {
        for t in [1e10, 1e100, f64::MAX] {
            assert!(matches!(
                build_partition(&PartitionParams::paper(t)),
                Err(LabError::PaperModeInfeasible(_))
            ));
        }
    }

    #[test]
    fn invalid_parameters() {
        let mut p = PartitionParams::desk_small(1e6);
        p.c_omega = 0.0;
        assert!(build_partition(&p).is_err());
        let mut p = PartitionParams::paper(1e6);
        p.c_omega = 400.0;
        assert!(matches!(build_partition(&p), Err(LabError::InvalidParameter(_))));
        let p = PartitionParams::desk_small(1e6).with_override(vec![3.0, 10.0]);
        assert!(build_partition(&p).is_err());
        let p = PartitionParams::desk_small(1e6).with_override(vec![E * E, 10.0, 10.0]);
        assert!(build_partition(&p).is_err());
    }

    #[test]
    fn p_sum_is_exact_sum_and_caps_use_exact_rationals() {
        let s = PartitionScheme::from_prime_windows(1e4, 1.2, 12.0, vec![vec![2, 3]]).unwrap();
        let w = s.window(2).unwrap();
        assert!((w.p_sum - 5.0 / 6.0).abs() < 1e-15);
        // 12 · 5/6 = 10 exactly, 1.2 · 5/6 = 1 (1.2 is not exact in binary)
        assert_eq!(w.m_cap, 10);
        assert!(w.r_cap == 1 || w.r_cap == 2);
    }

    #[test]
    fn json_export_fields() {
        let p = PartitionParams::desk_small(1e6).with_override(vec![E * E, 10.0, 100.0]);
        let s = build_partition(&p).unwrap();
        let v = serde_json::to_value(s.export()).unwrap();
        for key in ["mode", "T", "theta_min", "c_P", "c_Omega", "Tj", "Pj", "Mj", "Rj", "window_prime_counts"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["window_prime_counts"], serde_json::json!([0, 21]));
    }

    #[test]
    fn length_warning_flag() {
        let p = PartitionParams::desk_small(1e6).with_override(vec![E * E, 10.0, 100.0]);
        // 1e6^{1/10} ≈ 3.98 < 100
        assert!(build_partition(&p).unwrap().length_warning);
    }
}
