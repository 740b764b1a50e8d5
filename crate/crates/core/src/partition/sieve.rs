//! Segmented sieve of Eratosthenes over real-valued bounds.

use crate::error::{LabError, Result};

pub const SIEVE_LIMIT: f64 = 1e12;
const SEGMENT: usize = 1 << 18;

/// Primes up to and including `n` by a plain sieve.
pub fn small_primes(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut k = i * i;
            while k <= n {
                composite[k] = true;
                k += i;
            }
        }
    }
    out
}

/// All primes `p` with `lo <= p < hi`, ascending.
pub fn sieve_primes(lo: f64, hi: f64) -> Result<Vec<u64>> {
    if !(lo >= 2.0) || !(hi > lo) {
        return Err(LabError::Domain(format!(
            "sieve needs 2 <= lo < hi, got [{lo}, {hi})"
        )));
    }
    if hi > SIEVE_LIMIT {
        return Err(LabError::Capacity(format!(
            "sieve bound {hi:e} exceeds {SIEVE_LIMIT:e}"
        )));
    }
    // integers p with lo <= p < hi are exactly ceil(lo) <= p < ceil(hi)
    let start = lo.ceil() as u64;
    let end = hi.ceil() as u64;
    Ok(sieve_range(start, end))
}

/// Primes in the integer range `[start, end)`.
pub fn sieve_range(start: u64, end: u64) -> Vec<u64> {
    let start = start.max(2);
    if end <= start {
        return Vec::new();
    }
    let root = (end as f64).sqrt() as u64 + 1;
    let base = small_primes(root);
    let mut out = Vec::new();
    let mut seg = vec![false; SEGMENT];
    let mut low = start;
    while low < end {
        let high = (low + SEGMENT as u64).min(end);
        let len = (high - low) as usize;
        seg[..len].iter_mut().for_each(|c| *c = false);
        for &p in &base {
            if p * p >= high {
                break;
            }
            let first = (p * p).max(low.div_ceil(p) * p);
            let mut k = first;
            while k < high {
                seg[(k - low) as usize] = true;
                k += p;
            }
        }
        out.extend(
            (0..len)
                .filter(|&i| !seg[i])
                .map(|i| low + i as u64),
        );
        low = high;
    }
    out
}
