//! TOML run configuration. Every key is optional; command-line flags win.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use pmtherm::scheme::SchemeConfig;
use serde::Deserialize;

use crate::output::Format;

pub const DEFAULT_OUTPUT: &str = "out";

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Root seed for every stochastic output; overrides the section seeds.
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub relaxation: RelaxationSection,
    pub jarzynski: JarzynskiSection,
    pub scheme: SchemeConfig,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RelaxationSection {
    pub dt: f64,
    pub horizon: f64,
    pub steps: usize,
    /// `direct`, `statistical` or `poisson`; absent runs all three.
    pub description: Option<String>,
}

impl Default for RelaxationSection {
    fn default() -> Self {
        Self {
            dt: 1.0,
            horizon: 3.0,
            steps: 300,
            description: None,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JarzynskiSection {
    /// `constant`, `commuting-quench`, `driven-qubit` or `custom`.
    pub scenario: String,
    /// Schedule file for the `custom` scenario.
    pub schedule: Option<PathBuf>,
    pub samples: usize,
    pub seed: u64,
    pub beta: f64,
    pub epsilon: f64,
    pub epsilon_prime: f64,
    pub t_f: f64,
    pub steps: usize,
    /// Replaces the computed `ΔF` in the check.
    pub delta_f: Option<f64>,
}

impl Default for JarzynskiSection {
    fn default() -> Self {
        Self {
            scenario: "driven-qubit".into(),
            schedule: None,
            samples: 100_000,
            seed: 42,
            beta: 1.0,
            epsilon: 1.0,
            epsilon_prime: 2.0,
            t_f: 1.0,
            steps: 400,
            delta_f: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn output_dir(&self, flag: Option<&Path>) -> PathBuf {
        flag.map(Path::to_path_buf)
            .or_else(|| self.output.clone())
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT))
    }

    pub fn format(&self, flag: Option<Format>) -> Format {
        flag.or(self.format).unwrap_or_default()
    }
}

/// Hamiltonian endpoints of a custom drive, `H(λ) = (1-λ)·initial + λ·final`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleFile {
    pub t_f: f64,
    pub steps: usize,
    pub beta: Option<f64>,
    pub initial: MatrixSpec,
    #[serde(rename = "final")]
    pub final_: MatrixSpec,
}

/// Row-major real and optional imaginary parts.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

impl ScheduleFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read schedule {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("invalid schedule {}", path.display()))
    }
}
