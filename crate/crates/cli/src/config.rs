use std::path::Path;

use serde::Deserialize;

use crate::error::CliError;

pub const ENV_VAR: &str = "POLYMOD_CONFIG";

/// Settings shared by all subcommands. Read from a JSON file, then
/// overridden field by field from the command line.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub tol_sum: f64,
    pub tol_ideal: f64,
    pub tol_roundtrip: f64,
    pub samples: u64,
    pub seed: u64,
    pub format: String,
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tol_sum: polymod::combinatorics::TOL_SUM,
            tol_ideal: polymod::lorentz::TOL_IDEAL,
            tol_roundtrip: 1e-9,
            samples: 1000,
            seed: 0,
            format: "json".into(),
            jobs: 1,
        }
    }
}

impl RunConfig {
    /// Loads `path`, or `$POLYMOD_CONFIG` when no path is given, or the
    /// defaults when neither is set.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let from_env = std::env::var_os(ENV_VAR).filter(|v| !v.is_empty());
        let path = match (path, &from_env) {
            (Some(p), _) => p.to_path_buf(),
            (None, Some(v)) => v.into(),
            (None, None) => return Ok(RunConfig::default()),
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::input("ConfigError", format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::input("ConfigError", format!("invalid config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for (name, v) in [("tol_sum", self.tol_sum), ("tol_ideal", self.tol_ideal), ("tol_roundtrip", self.tol_roundtrip)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::input("ConfigError", format!("{name} must be positive, got {v}")));
            }
        }
        if self.jobs == 0 {
            return Err(CliError::input("ConfigError", "jobs must be at least 1"));
        }
        Ok(())
    }
}
