//! Uniform grids of Z(t) with a binary on-disk cache.
//!
//! Cache layout (little-endian):
//!
//! ```text
//! "ZGRD" | version u32 | t_start f64 | t_end f64 | spacing f64
//!        | target_abs_err f64 | count u64 | count × (Z f64, θ f64) | crc32(body) u32
//! ```

use std::f64::consts::PI;
use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;

use super::riemann_siegel::RiemannSiegel;
use crate::error::{LabError, Result};

const MAGIC: &[u8; 4] = b"ZGRD";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 8 * 4 + 8;
/// Points per parallel work item; fixed so output never depends on the pool.
const CHUNK: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridMethod {
    /// Riemann–Siegel above the switch height, Euler–Maclaurin below it.
    RiemannSiegel,
}

/// Samples of Z(t) and θ(t) at `t_start + i·spacing`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZetaGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub spacing: f64,
    pub target_abs_err: f64,
    pub method: GridMethod,
    pub z_values: Vec<f64>,
    pub theta: Vec<f64>,
}

impl ZetaGrid {
    pub fn len(&self) -> usize {
        self.z_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z_values.is_empty()
    }

    pub fn t(&self, i: usize) -> f64 {
        self.t_start + i as f64 * self.spacing
    }

    /// ζ(1/2 + i t_i) = Z(t_i) e^{-iθ(t_i)}.
    pub fn value(&self, i: usize) -> Complex64 {
        Complex64::from_polar(self.z_values[i], -self.theta[i])
    }

    pub fn values(&self) -> Vec<Complex64> {
        (0..self.len()).map(|i| self.value(i)).collect()
    }

    /// Index of the grid point equal to `t`, if `t` is a node up to rounding.
    pub fn node_index(&self, t: f64) -> Option<usize> {
        let x = (t - self.t_start) / self.spacing;
        let i = x.round();
        if i < 0.0 || i as usize >= self.len() {
            return None;
        }
        let tol = 1e-9 * (1.0 + x.abs());
        ((x - i).abs() <= tol).then_some(i as usize)
    }
}

/// Coarsest spacing accepted for a grid ending at `t_end`.
pub fn max_spacing(t_end: f64) -> f64 {
    PI / (4.0 * (t_end / (2.0 * PI)).ln())
}

/// Default spacing: at least eight samples per mean zero gap, never above 0.02.
pub fn default_spacing(t_end: f64) -> f64 {
    0.02f64.min(PI / (8.0 * (t_end / (2.0 * PI)).ln()))
}

fn grid_len(t_start: f64, t_end: f64, spacing: f64) -> usize {
    ((t_end - t_start) / spacing + 1e-9).floor() as usize + 1
}

fn validate(t_start: f64, t_end: f64, spacing: f64) -> Result<()> {
    if !(t_start >= 10.0) || !t_end.is_finite() || t_end < t_start {
        return Err(LabError::Domain(format!(
            "grid needs 10 <= t_start <= t_end, got [{t_start}, {t_end}]"
        )));
    }
    if !(spacing > 0.0) {
        return Err(LabError::InvalidParameter(format!("spacing {spacing} must be positive")));
    }
    let required = max_spacing(t_end.max(2.0 * PI * std::f64::consts::E));
    if spacing > required {
        return Err(LabError::SpacingTooCoarse { spacing, required });
    }
    Ok(())
}

/// Sample Z and θ on `[t_start, t_end]`.
///
/// Each sample is evaluated independently and written at its own index, so
/// the result is bit-identical for every thread count.
pub fn zeta_grid(t_start: f64, t_end: f64, spacing: f64, target_abs_err: f64) -> Result<ZetaGrid> {
    validate(t_start, t_end, spacing)?;
    let n = grid_len(t_start, t_end, spacing);
    let rs = RiemannSiegel::new(t_end);
    let mut z_values = vec![0.0; n];
    let mut theta = vec![0.0; n];
    z_values
        .par_chunks_mut(CHUNK)
        .zip(theta.par_chunks_mut(CHUNK))
        .enumerate()
        .try_for_each(|(c, (zs, ths))| -> Result<()> {
            for (k, (z, th)) in zs.iter_mut().zip(ths.iter_mut()).enumerate() {
                let t = t_start + (c * CHUNK + k) as f64 * spacing;
                let (zv, tv) = rs.z_and_theta(t)?;
                *z = zv;
                *th = tv;
            }
            Ok(())
        })?;
    Ok(ZetaGrid {
        t_start,
        t_end,
        spacing,
        target_abs_err,
        method: GridMethod::RiemannSiegel,
        z_values,
        theta,
    })
}

/// Directory of cached grids keyed by their parameters.
#[derive(Clone, Debug)]
pub struct GridCache {
    dir: PathBuf,
}

/// Outcome of a cache lookup.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub hit: bool,
    /// Number of Z(t) evaluations performed (zero on a hit).
    pub evaluations: u64,
}

impl GridCache {
    pub const ENV_VAR: &'static str = "ZMLAB_CACHE";

    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// Cache at `$ZMLAB_CACHE` if set, else at `fallback`.
    pub fn from_env_or(fallback: impl Into<PathBuf>) -> Self {
        match std::env::var_os(Self::ENV_VAR) {
            Some(dir) if !dir.is_empty() => Self::new(dir),
            _ => Self::new(fallback),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, t_start: f64, t_end: f64, spacing: f64, target: f64) -> PathBuf {
        self.dir.join(format!(
            "zgrid-{:016x}-{:016x}-{:016x}-{:016x}.zgrd",
            t_start.to_bits(),
            t_end.to_bits(),
            spacing.to_bits(),
            target.to_bits()
        ))
    }

    pub fn load_or_compute(
        &self,
        t_start: f64,
        t_end: f64,
        spacing: f64,
        target: f64,
    ) -> Result<(ZetaGrid, CacheStats)> {
        let path = self.path_for(t_start, t_end, spacing, target);
        if path.exists() {
            let grid = read_grid(&path)?;
            return Ok((
                grid,
                CacheStats {
                    hit: true,
                    evaluations: 0,
                },
            ));
        }
        let grid = zeta_grid(t_start, t_end, spacing, target)?;
        fs::create_dir_all(&self.dir).map_err(|e| LabError::io(&self.dir, e))?;
        write_grid(&grid, &path)?;
        let evaluations = grid.len() as u64;
        Ok((
            grid,
            CacheStats {
                hit: false,
                evaluations,
            },
        ))
    }
}

pub fn write_grid(grid: &ZetaGrid, path: &Path) -> Result<()> {
    let tmp = path.with_extension("zgrd.tmp");
    let file = fs::File::create(&tmp).map_err(|e| LabError::io(&tmp, e))?;
    let mut w = BufWriter::new(file);
    let mut header = Vec::with_capacity(HEADER_LEN);
    header.extend_from_slice(MAGIC);
    header.extend_from_slice(&VERSION.to_le_bytes());
    for x in [grid.t_start, grid.t_end, grid.spacing, grid.target_abs_err] {
        header.extend_from_slice(&x.to_le_bytes());
    }
    header.extend_from_slice(&(grid.len() as u64).to_le_bytes());
    w.write_all(&header).map_err(|e| LabError::io(&tmp, e))?;

    let mut crc = crc32fast::Hasher::new();
    let mut buf = Vec::with_capacity(16 * CHUNK);
    for (zs, ths) in grid.z_values.chunks(CHUNK).zip(grid.theta.chunks(CHUNK)) {
        buf.clear();
        for (z, th) in zs.iter().zip(ths) {
            buf.extend_from_slice(&z.to_le_bytes());
            buf.extend_from_slice(&th.to_le_bytes());
        }
        crc.update(&buf);
        w.write_all(&buf).map_err(|e| LabError::io(&tmp, e))?;
    }
    w.write_all(&crc.finalize().to_le_bytes())
        .map_err(|e| LabError::io(&tmp, e))?;
    w.flush().map_err(|e| LabError::io(&tmp, e))?;
    drop(w);
    fs::rename(&tmp, path).map_err(|e| LabError::io(path, e))
}

pub fn read_grid(path: &Path) -> Result<ZetaGrid> {
    let corrupt = |reason: &str| LabError::CorruptCache {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| LabError::io(path, e))?;
    if bytes.len() < HEADER_LEN + 4 || &bytes[..4] != MAGIC {
        return Err(corrupt("bad magic or truncated header"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    if u32_at(4) != VERSION {
        return Err(corrupt("unsupported version"));
    }
    let (t_start, t_end, spacing, target) = (f64_at(8), f64_at(16), f64_at(24), f64_at(32));
    let count = u64::from_le_bytes(bytes[40..48].try_into().unwrap()) as usize;
    let body_len = count
        .checked_mul(16)
        .ok_or_else(|| corrupt("count overflow"))?;
    if bytes.len() != HEADER_LEN + body_len + 4 {
        return Err(corrupt("length does not match count"));
    }
    let body = &bytes[HEADER_LEN..HEADER_LEN + body_len];
    if crc32fast::hash(body) != u32_at(HEADER_LEN + body_len) {
        return Err(corrupt("CRC mismatch"));
    }
    let mut z_values = Vec::with_capacity(count);
    let mut theta = Vec::with_capacity(count);
    for pair in body.chunks_exact(16) {
        z_values.push(f64::from_le_bytes(pair[..8].try_into().unwrap()));
        theta.push(f64::from_le_bytes(pair[8..].try_into().unwrap()));
    }
    Ok(ZetaGrid {
        t_start,
        t_end,
        spacing,
        target_abs_err: target,
        method: GridMethod::RiemannSiegel,
        z_values,
        theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::{hardy_z, rs_theta};

    #[test]
    fn single_point_grid() {
        let g = zeta_grid(123.4, 123.4, 0.01, 1e-8).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.z_values[0], hardy_z(123.4).unwrap());
        assert_eq!(g.theta[0], rs_theta(123.4).unwrap());
    }

    #[test]
    fn length_rule() {
        let g = zeta_grid(100.0, 101.0, 0.1, 1e-8).unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g.node_index(100.5), Some(5));
        assert_eq!(g.node_index(100.55), None);
    }

    #[test]
    fn coarse_spacing_is_refused() {
        let err = zeta_grid(100.0, 200.0, 0.5, 1e-8).unwrap_err();
        match err {
            LabError::SpacingTooCoarse { required, .. } => {
                assert!((required - max_spacing(200.0)).abs() < 1e-15)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn modulus_identity_on_grid() {
        let g = zeta_grid(100.0, 200.0, 0.05, 1e-6).unwrap();
        for (i, v) in g.values().iter().enumerate() {
            assert!((v.norm() - g.z_values[i].abs()).abs() <= 2e-6);
        }
    }

    #[test]
    fn cache_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let cache = GridCache::new(dir.path());
        let (fresh, s1) = cache.load_or_compute(50.0, 60.0, 0.01, 1e-6).unwrap();
        assert!(!s1.hit);
        assert_eq!(s1.evaluations, fresh.len() as u64);
        let (again, s2) = cache.load_or_compute(50.0, 60.0, 0.01, 1e-6).unwrap();
        assert!(s2.hit);
        assert_eq!(s2.evaluations, 0);
        assert_eq!(fresh, again);
    }

    #[test]
    fn corrupted_cache_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let cache = GridCache::new(dir.path());
        let (g, _) = cache.load_or_compute(50.0, 51.0, 0.01, 1e-6).unwrap();
        let path = cache.path_for(50.0, 51.0, 0.01, 1e-6);
        let mut bytes = fs::read(&path).unwrap();
        bytes[HEADER_LEN + 3] ^= 0xff;
        fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_grid(&path), Err(LabError::CorruptCache { .. })));
        assert_eq!(g.len(), 101);
    }
}
