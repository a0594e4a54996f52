//! Run configuration from TOML. Every table and key is optional.
//!
//! ```toml
//! time_scale = 0.016666666666666666
//! # optional restarts of PBCD from several initial rho1 values;
//! # the run with the lowest objective is kept
//! rho1_starts = [0.005, 0.019, 0.06]
//!
//! [pbcd]
//! gamma1 = 1.8
//! rho1 = 0.02
//!
//! [pbcd.pg]
//! max_iter = 100
//!
//! [assignment]
//! tol = 1e-8
//!
//! [search]
//! grid_points = 1000
//!
//! [oracle]
//! budget = 10000
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use tollforge_core::baselines::SearchOptions;
use tollforge_core::{AssignmentConfig, PbcdConfig};

use crate::error::{Error, Result};
use crate::instance::DEFAULT_TIME_SCALE;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Multiplier turning `sum t v` into the reported `F`.
    pub time_scale: f64,
    /// Initial `rho1` values for a multi-start PBCD. Empty means one run.
    pub rho1_starts: Vec<f64>,
    pub pbcd: PbcdConfig,
    pub assignment: AssignmentSection,
    pub search: SearchOptions,
    pub oracle: OracleSection,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            time_scale: DEFAULT_TIME_SCALE,
            rho1_starts: Vec::new(),
            pbcd: PbcdConfig::default(),
            assignment: AssignmentSection::default(),
            search: SearchOptions::default(),
            oracle: OracleSection::default(),
        }
    }
}

/// Equilibrium solves outside PBCD (references, baselines, `solve-ue`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssignmentSection {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for AssignmentSection {
    fn default() -> Self {
        AssignmentSection {
            tol: 1e-8,
            max_iter: 1000,
        }
    }
}

impl AssignmentSection {
    pub fn to_config(self) -> AssignmentConfig {
        AssignmentConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            ..AssignmentConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSection {
    /// Largest number of subsets brute force will enumerate.
    pub budget: u64,
}

impl Default for OracleSection {
    fn default() -> Self {
        OracleSection { budget: 10_000 }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.time_scale > 0.0 && self.time_scale.is_finite()) {
            return Err(Error::Config(format!(
                "time_scale must be positive, got {}",
                self.time_scale
            )));
        }
        if let Some(r) = self.rho1_starts.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
            return Err(Error::Config(format!("rho1_starts must be positive, got {r}")));
        }
        if !(self.assignment.tol > 0.0) || self.assignment.max_iter == 0 {
            return Err(Error::Config(
                "assignment tol must be positive and max_iter nonzero".into(),
            ));
        }
        if self.search.max_evaluations == 0 || self.search.line_samples == 0 {
            return Err(Error::Config(
                "search needs a positive evaluation budget and line sample count".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default() {
        assert_eq!(Config::from_toml("").unwrap(), Config::default());
    }

    #[test]
    fn partial_tables() {
        let c = Config::from_toml(
            "[pbcd]\ngamma1 = 2.0\nrho1 = 0.5\n[pbcd.pg]\nmax_iter = 7\n[search]\ngrid_points = 64\n",
        )
        .unwrap();
        assert_eq!(c.pbcd.gamma1, 2.0);
        assert_eq!(c.pbcd.gamma2, PbcdConfig::default().gamma2);
        assert_eq!(c.pbcd.rho1, Some(0.5));
        assert_eq!(c.pbcd.pg.max_iter, 7);
        assert_eq!(c.search.grid_points, 64);
    }

    #[test]
    fn round_trip() {
        let mut c = Config::default();
        c.pbcd.kappa = 3;
        c.pbcd.rho2 = Some(0.25);
        assert_eq!(Config::from_toml(&c.to_toml().unwrap()).unwrap(), c);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(matches!(Config::from_toml("[pbcd]\ngama1 = 2\n"), Err(Error::Config(_))));
        assert!(matches!(Config::from_toml("time_scale = -1\n"), Err(Error::Config(_))));
        assert!(matches!(Config::from_toml("rho1_starts = [0.1, 0]\n"), Err(Error::Config(_))));
    }

    #[test]
    fn readme_example_parses() {
        let readme = include_str!("../../../README.md");
        let block = readme.split("```toml\n").nth(1).unwrap().split("```").next().unwrap();
        let c = Config::from_toml(block).unwrap();
        assert_eq!(c.pbcd.pg.max_iter, 100);
        assert!(c.rho1_starts.is_empty());
    }

    #[test]
    fn rho1_starts_parse() {
        let c = Config::from_toml("rho1_starts = [0.005, 0.06]\n").unwrap();
        assert_eq!(c.rho1_starts, vec![0.005, 0.06]);
    }
}
