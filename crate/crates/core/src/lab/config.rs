use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::partition::PartitionParams;
use crate::twisted4::ContourConfig;
use crate::zeta::{default_spacing, GridCache};

/// Which suites [`run_suite`](super::run_suite) executes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteSelection {
    pub identities: bool,
    pub inequalities: bool,
    pub moments: bool,
    pub twisted: bool,
}

impl SuiteSelection {
    pub fn all() -> Self {
        Self {
            identities: true,
            inequalities: true,
            moments: true,
            twisted: true,
        }
    }

    pub fn is_empty(&self) -> bool {
        !(self.identities || self.inequalities || self.moments || self.twisted)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabConfig {
    /// Height of the moment integrals over `[T, 2T]`.
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(default = "default_k")]
    pub k: Vec<f64>,
    /// Scheme used by the window polynomials; its own `T` may differ from the
    /// integration height.
    #[serde(default = "default_partition")]
    pub partition: PartitionParams,
    /// Grid spacing used for every grid instead of the default rule.
    #[serde(default)]
    pub spacing: Option<f64>,
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub suites: SuiteSelection,
    #[serde(default)]
    pub seed: u64,
    /// Number of random sites for the inequality suite.
    #[serde(default = "default_sites")]
    pub sites: usize,
    /// Extra heights for the moment shape scan.
    #[serde(default)]
    pub scan_t: Vec<f64>,
    /// Height of the twisted fourth-moment comparison; defaults to `T`.
    #[serde(default)]
    pub twisted_t: Option<f64>,
    #[serde(default)]
    pub contour: ContourConfig,
}

fn default_k() -> Vec<f64> {
    vec![0.0, 0.5, 1.0, 1.5, 2.0]
}

fn default_partition() -> PartitionParams {
    PartitionParams::desk_small(1e20)
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("zmlab-out")
}

fn default_sites() -> usize {
    1000
}

impl LabConfig {
    pub fn new(t: f64) -> Self {
        Self {
            t,
            k: default_k(),
            partition: default_partition(),
            spacing: None,
            cache_dir: None,
            out_dir: default_out_dir(),
            suites: SuiteSelection::default(),
            seed: 0,
            sites: default_sites(),
            scan_t: Vec::new(),
            twisted_t: None,
            contour: ContourConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        for &t in std::iter::once(&self.t).chain(&self.scan_t).chain(&self.twisted_t) {
            if !(t >= 10.0) || !t.is_finite() {
                return Err(LabError::InvalidParameter(format!("height {t} must be finite and >= 10")));
            }
        }
        if let Some(&k) = self.k.iter().find(|k| !(0.0..=2.0).contains(*k)) {
            return Err(LabError::InvalidParameter(format!("k = {k} outside [0, 2]")));
        }
        if let Some(h) = self.spacing {
            if !(h > 0.0) {
                return Err(LabError::InvalidParameter(format!("spacing {h} must be positive")));
            }
        }
        self.partition.validate()?;
        self.contour.bump.validate()
    }

    /// Grid spacing for a grid ending at `t_end`.
    pub fn spacing_for(&self, t_end: f64) -> f64 {
        self.spacing.unwrap_or_else(|| default_spacing(t_end))
    }

    /// `$ZMLAB_CACHE`, then the configured directory, then `out_dir/cache`.
    pub fn grid_cache(&self) -> GridCache {
        let fallback = self
            .cache_dir
            .clone()
            .unwrap_or_else(|| self.out_dir.join("cache"));
        GridCache::from_env_or(fallback)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_defaults() {
        let cfg = LabConfig::from_json(r#"{"T": 1000.0, "suites": {"moments": true}}"#).unwrap();
        assert_eq!(cfg.k, default_k());
        assert!(cfg.suites.moments && !cfg.suites.twisted);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(LabConfig::from_json(&text).unwrap(), cfg);
    }

    #[test]
    fn rejects_k_outside_range() {
        assert!(LabConfig::from_json(r#"{"T": 1000.0, "k": [1.0, 2.5]}"#).is_err());
        assert!(LabConfig::from_json(r#"{"T": 1000.0, "bogus": 1}"#).is_err());
    }
}
