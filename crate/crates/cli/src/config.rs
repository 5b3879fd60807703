use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use bergkern::{QuadratureConfig, ZeroConfig};
use serde::{Deserialize, Serialize};

/// Environment variable naming the config file read when `--config` is absent.
pub const CONFIG_ENV: &str = "BERGKERN_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Settings shared by every subcommand. Unset fields take the defaults
/// below; every artifact embeds the full resolved config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Quadrature relative tolerance (default 1e-11).
    pub rel_tol: f64,
    /// Quadrature absolute tolerance (default 1e-13).
    pub abs_tol: f64,
    /// Relative tail tolerance for truncated kernel series (default 1e-13).
    pub series_tol: f64,
    /// Series truncation used by `kernel` when no closed form exists (default 256).
    pub truncation: usize,
    /// Seed for randomized checks (default 7).
    pub seed: u64,
    /// Output file; stdout when absent.
    pub output: Option<PathBuf>,
    /// Output format; each subcommand has its own default when absent.
    pub format: Option<Format>,
    /// Worker threads for sweeps (default 4).
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let q = QuadratureConfig::default();
        Self {
            rel_tol: q.rel_tol,
            abs_tol: q.abs_tol,
            series_tol: ZeroConfig::default().series_tol,
            truncation: bergkern::kernels::DEFAULT_TRUNCATION,
            seed: 7,
            output: None,
            format: None,
            workers: 4,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        for (name, v) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol), ("series_tol", self.series_tol)] {
            if !(v > 0.0 && v < 1.0) {
                bail!("{name} must lie in (0, 1), got {v}");
            }
        }
        if !(1..=bergkern::kernels::MAX_TRUNCATION).contains(&self.truncation) {
            bail!("truncation must lie in 1..={}, got {}", bergkern::kernels::MAX_TRUNCATION, self.truncation);
        }
        if !(1..=256).contains(&self.workers) {
            bail!("workers must lie in 1..=256, got {}", self.workers);
        }
        self.quadrature().validate()?;
        Ok(())
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        QuadratureConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            ..QuadratureConfig::default()
        }
    }

    pub fn zeros(&self) -> ZeroConfig {
        ZeroConfig {
            quadrature: self.quadrature(),
            series_tol: self.series_tol,
            ..ZeroConfig::default()
        }
    }
}
