use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// Environment variable naming a TOML run configuration.
pub const CONFIG_ENV: &str = "ZETA_GAPS_CONFIG";

/// Defaults for every command; flags override individual fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// terms of the Dirichlet series for `--method direct`
    pub n_max: u64,
    /// scan step for `zeros`; the form's default step when absent
    pub scan_step: Option<f64>,
    /// random seed of the lemma suites
    pub seed: u64,
    /// Weyl differencing trials per λ
    pub trials: usize,
    /// constant `C` of the B-process error bound
    pub bprocess_constant: f64,
    /// largest `m` in reorder and window checks
    pub m_max: u64,
    /// grid points per axis in the window checks
    pub window_grid: usize,
    /// report destination; stdout when absent
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n_max: 100_000,
            scan_step: None,
            seed: 7,
            trials: 1000,
            bprocess_constant: 10.0,
            m_max: 6,
            window_grid: 20,
            output: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let cfg: RunConfig = toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Explicit path, else the environment variable, else defaults.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self, String> {
        match explicit {
            Some(p) => Self::load(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
                _ => Ok(Self::default()),
            },
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.n_max == 0 {
            return Err("n_max must be positive".into());
        }
        if let Some(step) = self.scan_step {
            if !(step > 0.0) {
                return Err(format!("scan_step must be positive, got {step}"));
            }
        }
        if !(self.bprocess_constant > 0.0) {
            return Err("bprocess_constant must be positive".into());
        }
        if self.trials == 0 || self.m_max == 0 || self.window_grid < 2 {
            return Err("trials and m_max must be positive, window_grid at least 2".into());
        }
        Ok(())
    }
}
