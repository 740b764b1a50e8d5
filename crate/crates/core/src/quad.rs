//! Composite quadrature on uniform samples.

use crate::error::{LabError, Result};
use crate::sum::NeumaierSum;

/// Composite Simpson value together with its half-density companion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimpsonEstimate {
    pub value: f64,
    pub coarse: f64,
    pub richardson_err: f64,
}

/// Composite Simpson rule over `samples` taken at spacing `h`.
///
/// The sample count must be odd (an even number of panels).
pub fn simpson(samples: &[f64], h: f64) -> Result<f64> {
    simpson_strided(samples, h, 1)
}

fn simpson_strided(samples: &[f64], h: f64, stride: usize) -> Result<f64> {
    let n = samples.len();
    if n < 3 || (n - 1) % (2 * stride) != 0 {
        return Err(LabError::InvalidParameter(format!(
            "Simpson needs 2·{stride}·m + 1 samples, got {n}"
        )));
    }
    let panels = (n - 1) / stride;
    let mut acc = NeumaierSum::new();
    for i in 0..=panels {
        let w = if i == 0 || i == panels {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc.add(w * samples[i * stride]);
    }
    Ok(acc.value() * h * stride as f64 / 3.0)
}

/// Simpson on the full grid plus the Richardson estimate obtained from the
/// half-density subgrid (every second sample).
///
/// Requires `(samples.len() - 1) % 4 == 0`.
pub fn simpson_richardson(samples: &[f64], h: f64) -> Result<SimpsonEstimate> {
    let value = simpson_strided(samples, h, 1)?;
    let coarse = simpson_strided(samples, h, 2)?;
    Ok(SimpsonEstimate {
        value,
        coarse,
        richardson_err: (value - coarse).abs() / 15.0,
    })
}

fn three_eighths(f: &[f64], h: f64) -> f64 {
    3.0 * h / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3])
}

/// Fourth-order rule for any number of samples (at least two).
///
/// The longest prefix with a multiple of four panels gets Simpson plus the
/// half-density estimate; the remaining one to five panels are closed with
/// Simpson and 3/8 pieces, which do not enter the error estimate.
pub fn integrate_samples(samples: &[f64], h: f64) -> Result<SimpsonEstimate> {
    let n = samples.len();
    if n < 2 {
        return Err(LabError::InvalidParameter(format!("need two samples, got {n}")));
    }
    let m = n - 1;
    if m == 1 {
        let v = 0.5 * h * (samples[0] + samples[1]);
        return Ok(SimpsonEstimate { value: v, coarse: v, richardson_err: 0.0 });
    }
    let tail = match m % 4 {
        0 => 0,
        2 => 2,
        3 => 3,
        _ => 5,
    };
    let split = m - tail.min(m);
    let main = if split >= 4 {
        simpson_richardson(&samples[..=split], h)?
    } else {
        SimpsonEstimate { value: 0.0, coarse: 0.0, richardson_err: 0.0 }
    };
    let rest = &samples[split..];
    let extra = match rest.len() - 1 {
        0 => 0.0,
        2 => simpson(rest, h)?,
        3 => three_eighths(rest, h),
        5 => simpson(&rest[..3], h)? + three_eighths(&rest[2..], h),
        k => unreachable!("tail of {k} panels"),
    };
    Ok(SimpsonEstimate {
        value: main.value + extra,
        coarse: main.coarse + extra,
        richardson_err: main.richardson_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_is_exact() {
        let xs = vec![1.0; 401];
        let est = simpson_richardson(&xs, 0.25).unwrap();
        assert_eq!(est.value, 100.0);
        assert_eq!(est.richardson_err, 0.0);
    }

    #[test]
    fn cubic_is_exact() {
        let h = 0.1;
        let xs: Vec<f64> = (0..=20).map(|i| (i as f64 * h).powi(3)).collect();
        assert!((simpson(&xs, h).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_even_sample_count() {
        assert!(simpson(&[1.0, 2.0], 1.0).is_err());
        assert!(simpson_richardson(&[1.0; 7], 1.0).is_err());
    }

    #[test]
    fn richardson_tracks_true_error() {
        let h = std::f64::consts::PI / 64.0;
        let xs: Vec<f64> = (0..=64).map(|i| (i as f64 * h).sin()).collect();
        let est = simpson_richardson(&xs, h).unwrap();
        let true_err = (est.value - 2.0).abs();
        assert!(true_err <= 3.0 * est.richardson_err);
        assert!(true_err > 0.0);
    }

    #[test]
    fn any_sample_count_is_fourth_order() {
        for n in 2..40usize {
            let h = 1.0 / (n - 1) as f64;
            let xs: Vec<f64> = (0..n).map(|i| (i as f64 * h).powi(3)).collect();
            let v = integrate_samples(&xs, h).unwrap().value;
            let tol = if n == 2 { 0.3 } else { 1e-13 };
            assert!((v - 0.25).abs() < tol, "n = {n}: {v}");
        }
    }
}
