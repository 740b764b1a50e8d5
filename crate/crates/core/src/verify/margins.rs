//! Pointwise margins for the truncation lemma and the moment inequality.

use std::fmt;
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cert::taylor_certificate;
use crate::error::{LabError, Result};
use crate::partition::{window_n, window_p, PartitionScheme, Window};
use crate::zeta::{hardy_z, zeta, RS_MIN_HEIGHT};

/// Relative slack allowed for rounding when counting violations.
pub const ROUNDING_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseId {
    AllWindowsSmall,
    /// First window `v` with `|𝒫_v(s)| > c_P P_v`.
    Cutoff(usize),
    Window(usize),
    WindowSkipped(usize),
    HypothesisFailed(usize),
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseId::AllWindowsSmall => write!(f, "all-windows-small"),
            CaseId::Cutoff(v) => write!(f, "v={v}"),
            CaseId::Window(j) => write!(f, "j={j}"),
            CaseId::WindowSkipped(j) => write!(f, "j={j}:skipped"),
            CaseId::HypothesisFailed(j) => write!(f, "j={j}:hypothesis-failed"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    pub site: Complex64,
    pub case: CaseId,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`, kept even when negative.
    pub margin: f64,
    pub certified: bool,
}

impl MarginReport {
    fn new(site: Complex64, case: CaseId, lhs: f64, rhs: f64, certified: bool) -> Self {
        Self {
            site,
            case,
            lhs,
            rhs,
            margin: rhs - lhs,
            certified,
        }
    }

    /// A certified report with a negative margin beyond rounding.
    pub fn is_violation(&self) -> bool {
        self.certified && self.margin < -ROUNDING_SLACK * self.rhs.abs().max(self.lhs.abs())
    }
}

/// Full-precision float formatting used in every CSV report.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Columns `site_t, case, lhs, rhs, margin, certified`.
pub fn write_margin_csv<W: Write>(reports: &[MarginReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["site_t", "case", "lhs", "rhs", "margin", "certified"])?;
    for r in reports {
        w.write_record([
            fmt_f64(r.site.im),
            r.case.to_string(),
            fmt_f64(r.lhs),
            fmt_f64(r.rhs),
            fmt_f64(r.margin),
            r.certified.to_string(),
        ])?;
    }
    w.flush().map_err(|e| LabError::io("<csv>", e))?;
    Ok(())
}

/// `n` seeded points `1/2 + it` with `t` uniform in `[t_lo, t_hi)`.
pub fn random_line_sites(n: usize, seed: u64, t_lo: f64, t_hi: f64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Complex64::new(0.5, rng.gen_range(t_lo..t_hi)))
        .collect()
}

fn zeta_abs(s: Complex64) -> Result<f64> {
    if s.re == 0.5 && s.im >= RS_MIN_HEIGHT {
        Ok(hardy_z(s.im)?.abs())
    } else {
        Ok(zeta(s, 1e-10)?.norm())
    }
}

fn one_minus_exp_neg(p: f64) -> f64 {
    -(-p).exp_m1()
}

fn certified_window(w: &Window, c_p: f64) -> bool {
    taylor_certificate(w.j, w.p_sum, w.m_cap as u64, c_p).passed
}

/// `exp(2α Re 𝒫_j(s))` against `(1 − e^{-P_j})^{-1} |𝒩_j(s; α)|²`.
pub fn lemma1_check(s: Complex64, scheme: &PartitionScheme, j: usize, alpha: f64) -> Result<MarginReport> {
    if !(alpha.abs() <= 2.0) {
        return Err(LabError::Domain(format!("|alpha| = {} exceeds 2", alpha.abs())));
    }
    let w = scheme.window(j)?;
    if w.is_empty() {
        return Ok(MarginReport::new(s, CaseId::WindowSkipped(j), 1.0, 1.0, true));
    }
    let c_p = scheme.params.c_p;
    let p = window_p(w, s);
    let lhs = (2.0 * alpha * p.re).exp();
    let rhs = window_n(w, s, alpha).norm_sqr() / one_minus_exp_neg(w.p_sum);
    if p.norm() > c_p * w.p_sum {
        return Ok(MarginReport::new(s, CaseId::HypothesisFailed(j), lhs, rhs, false));
    }
    Ok(MarginReport::new(s, CaseId::Window(j), lhs, rhs, certified_window(w, c_p)))
}

/// Which case of the moment inequality applies at `s`, with its bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub case: CaseId,
    pub zeta_abs: f64,
    /// `k |ζ|⁴ Π |𝒩_j(s; k−2)|²` and `(2−k) Π |𝒩_j(s; k)|²` over `j < v`
    /// (all `j` when every window is small).
    pub terms: [f64; 2],
    /// `|𝒫_v(s) / (c_P P_v)|^{2 R_v}`, 1 when every window is small.
    pub spike_factor: f64,
    /// `(terms[0] + terms[1]) · spike_factor`.
    pub bound: f64,
}

struct Prefix {
    zeta_abs: f64,
    /// Products over the windows before index `i`.
    prod_km2: Vec<f64>,
    prod_k: Vec<f64>,
    /// `(v, spike factor)` for each nonempty window, in order.
    spikes: Vec<(usize, f64, bool)>,
}

fn check_site(s: Complex64, k: f64) -> Result<()> {
    if !(0.0..=2.0).contains(&k) {
        return Err(LabError::Domain(format!("k = {k} outside [0, 2]")));
    }
    if !(s.re > 0.0 && s.re < 1.0) {
        return Err(LabError::Domain(format!("Re s = {} outside (0, 1)", s.re)));
    }
    Ok(())
}

fn prefix(s: Complex64, k: f64, scheme: &PartitionScheme) -> Result<Prefix> {
    check_site(s, k)?;
    let c_p = scheme.params.c_p;
    let mut prod_km2 = vec![1.0];
    let mut prod_k = vec![1.0];
    let mut spikes = Vec::new();
    for w in &scheme.windows {
        let (mut a, mut b) = (*prod_km2.last().unwrap(), *prod_k.last().unwrap());
        if !w.is_empty() {
            let ratio = window_p(w, s).norm() / (c_p * w.p_sum);
            spikes.push((w.j, ratio.powi(2 * w.r_cap as i32), ratio > 1.0));
            a *= window_n(w, s, k - 2.0).norm_sqr();
            b *= window_n(w, s, k).norm_sqr();
        }
        prod_km2.push(a);
        prod_k.push(b);
    }
    Ok(Prefix {
        zeta_abs: zeta_abs(s)?,
        prod_km2,
        prod_k,
        spikes,
    })
}

impl Prefix {
    /// Bracket `k|ζ|⁴ Π_{j<v} … + (2−k) Π_{j<v} …`, `v` a window index.
    fn terms_before(&self, v: usize, k: f64) -> [f64; 2] {
        let i = v - 2;
        [
            k * self.zeta_abs.powi(4) * self.prod_km2[i],
            (2.0 - k) * self.prod_k[i],
        ]
    }
}

pub fn prop1_decompose(s: Complex64, k: f64, scheme: &PartitionScheme) -> Result<Decomposition> {
    let pre = prefix(s, k, scheme)?;
    Ok(decompose_from(&pre, k, scheme))
}

fn decompose_from(pre: &Prefix, k: f64, scheme: &PartitionScheme) -> Decomposition {
    match pre.spikes.iter().find(|(_, _, big)| *big) {
        Some(&(v, factor, _)) => {
            let terms = pre.terms_before(v, k);
            Decomposition {
                case: CaseId::Cutoff(v),
                zeta_abs: pre.zeta_abs,
                terms,
                spike_factor: factor,
                bound: (terms[0] + terms[1]) * factor,
            }
        }
        None => {
            let terms = pre.terms_before(scheme.ell + 1, k);
            Decomposition {
                case: CaseId::AllWindowsSmall,
                zeta_abs: pre.zeta_abs,
                terms,
                spike_factor: 1.0,
                bound: terms[0] + terms[1],
            }
        }
    }
}

/// `|ζ(s)|^{2k}` against the full right side of the moment inequality.
pub fn prop1_check(s: Complex64, k: f64, scheme: &PartitionScheme) -> Result<MarginReport> {
    let pre = prefix(s, k, scheme)?;
    let dec = decompose_from(&pre, k, scheme);
    let head = pre.terms_before(scheme.ell + 1, k);
    let mut rhs = head[0] + head[1];
    for &(v, factor, _) in &pre.spikes {
        let t = pre.terms_before(v, k);
        rhs += (t[0] + t[1]) * factor;
    }
    let lhs = pre.zeta_abs.powf(2.0 * k);
    let certified = k == 0.0 || k == 2.0 || {
        let last = match dec.case {
            CaseId::Cutoff(v) => v,
            _ => scheme.ell + 1,
        };
        let used = scheme.windows.iter().filter(|w| w.j < last && !w.is_empty());
        let mut product = 1.0;
        let mut all = true;
        for w in used {
            product /= one_minus_exp_neg(w.p_sum);
            all &= certified_window(w, scheme.params.c_p);
        }
        all && product <= 2.0
    };
    Ok(MarginReport::new(s, dec.case, lhs, rhs, certified))
}

/// [`lemma1_check`] at every site and nonempty window, in site order.
pub fn lemma1_suite(scheme: &PartitionScheme, sites: &[Complex64], alpha: f64) -> Result<Vec<MarginReport>> {
    let per_site: Vec<Result<Vec<MarginReport>>> = sites
        .par_iter()
        .map(|&s| {
            scheme
                .windows
                .iter()
                .filter(|w| !w.is_empty())
                .map(|w| lemma1_check(s, scheme, w.j, alpha))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for r in per_site {
        out.extend(r?);
    }
    Ok(out)
}

/// [`prop1_check`] at every site, in site order.
pub fn prop1_suite(scheme: &PartitionScheme, sites: &[Complex64], k: f64) -> Result<Vec<MarginReport>> {
    sites.par_iter().map(|&s| prop1_check(s, k, scheme)).collect()
}

/// `(k/2) c⁴ d^{2k−4} + (1 − k/2) d^{2k} − c^{2k}`, nonnegative by Young.
pub fn young_scalar_margin(c: f64, d: f64, k: f64) -> f64 {
    0.5 * k * c.powi(4) * d.powf(2.0 * k - 4.0) + (1.0 - 0.5 * k) * d.powf(2.0 * k) - c.powf(2.0 * k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{build_partition, PartitionParams};
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn certified_scheme() -> PartitionScheme {
        let p = PartitionParams::desk_certified(1e12).with_override(vec![E * E, 1000.0]);
        build_partition(&p).unwrap()
    }

    #[test]
    fn certified_scheme_is_certified() {
        let s = certified_scheme();
        let w = s.window(2).unwrap();
        assert!((1.0..1.1).contains(&w.p_sum), "{}", w.p_sum);
        assert!(certified_window(w, s.params.c_p));
        assert!(1.0 / one_minus_exp_neg(w.p_sum) <= 2.0);
    }

    #[test]
    fn lemma1_trivial_alpha_and_empty_window() {
        let s = certified_scheme();
        let site = Complex64::new(0.5, 123.4);
        let r = lemma1_check(site, &s, 2, 0.0).unwrap();
        assert_eq!(r.lhs, 1.0);
        assert!(r.rhs >= 1.0 && r.margin >= 0.0);
        let desk = build_partition(&PartitionParams::desk_small(1e10)).unwrap();
        let r = lemma1_check(site, &desk, 2, 1.0).unwrap();
        assert_eq!(r.case, CaseId::WindowSkipped(2));
        assert!(lemma1_check(site, &s, 2, 2.5).is_err());
    }

    #[test]
    fn lemma1_no_certified_violations() {
        let s = certified_scheme();
        let sites = random_line_sites(1000, 11, 100.0, 1e4);
        for alpha in [-2.0, -1.0, 0.5, 1.0, 2.0] {
            let reports = lemma1_suite(&s, &sites, alpha).unwrap();
            assert_eq!(reports.len(), 1000);
            assert!(reports.iter().any(|r| r.certified));
            let bad: Vec<_> = reports.iter().filter(|r| r.is_violation()).collect();
            assert!(bad.is_empty(), "alpha = {alpha}: {:?}", bad.first());
        }
    }

    #[test]
    fn prop1_trivial_cases() {
        let s = certified_scheme();
        for site in random_line_sites(50, 3, 50.0, 5000.0) {
            let r2 = prop1_check(site, 2.0, &s).unwrap();
            assert!(r2.certified);
            assert!(r2.margin >= r2.lhs * (1.0 - 1e-12), "{r2:?}");
            let r0 = prop1_check(site, 0.0, &s).unwrap();
            assert_eq!(r0.lhs, 1.0);
            assert!(r0.margin >= 1.0 - 1e-12, "{r0:?}");
            let d = prop1_decompose(site, 2.0, &s).unwrap();
            if d.case == CaseId::AllWindowsSmall {
                assert!((d.terms[0] - 2.0 * d.zeta_abs.powi(4)).abs() <= 1e-12 * d.terms[0]);
                assert_eq!(d.terms[1], 0.0);
            }
        }
        assert!(prop1_check(Complex64::new(1.5, 10.0), 1.0, &s).is_err());
        assert!(prop1_check(Complex64::new(0.5, 10.0), 2.5, &s).is_err());
    }

    #[test]
    fn prop1_k1_certified_margins() {
        let s = certified_scheme();
        let reports = prop1_suite(&s, &random_line_sites(200, 5, 100.0, 1e4), 1.0).unwrap();
        assert!(reports.iter().filter(|r| r.certified).count() > 100);
        assert!(reports.iter().all(|r| !r.is_violation()));
    }

    #[test]
    fn spiked_window_selects_its_cutoff() {
        let small: Vec<u64> = crate::partition::sieve_primes(11.0, 100.0).unwrap();
        let s = PartitionScheme::from_prime_windows(1e6, 2.0, 20.0, vec![small, vec![1031]]).unwrap();
        let d = prop1_decompose(Complex64::new(0.9, 0.0), 1.0, &s).unwrap();
        assert_eq!(d.case, CaseId::Cutoff(3));
        assert!(d.spike_factor > 1.0);
        let d = prop1_decompose(Complex64::new(0.9, 0.0), 1.0, &PartitionScheme::from_prime_windows(
            1e6,
            2.0,
            20.0,
            vec![vec![11, 13]],
        ).unwrap()).unwrap();
        assert_eq!(d.case, CaseId::AllWindowsSmall);
    }

    #[test]
    fn csv_has_fixed_columns() {
        let s = certified_scheme();
        let reports = prop1_suite(&s, &random_line_sites(3, 1, 100.0, 200.0), 2.0).unwrap();
        let mut buf = Vec::new();
        write_margin_csv(&reports, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("site_t,case,lhs,rhs,margin,certified"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 6);
        assert_eq!(row[0].parse::<f64>().unwrap(), reports[0].site.im);
        assert_eq!(row[4].parse::<f64>().unwrap(), reports[0].margin);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn young_scalar(c in 1e-3f64..1e3, d in 1e-3f64..1e3, k in 0.0f64..2.0) {
            let m = young_scalar_margin(c, d, k);
            let scale = c.powf(2.0 * k).max(d.powf(2.0 * k));
            prop_assert!(m >= -1e-12 * scale, "c = {}, d = {}, k = {}: {}", c, d, k, m);
        }
    }
}
