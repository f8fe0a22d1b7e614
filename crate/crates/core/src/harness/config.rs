use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::optimizers::OptimizerConfig;
use crate::simulator::{build_efficient_su2, build_heisenberg, NoiseMode, VqeProblem};

/// Seed of the calibration stream unless a config overrides it.
pub const CALIBRATION_SEED: u64 = 0x5EED_CA1B;

/// Heisenberg chain and ansatz depth. Defaults to the critical Ising chain
/// with 5 qubits and 3 layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProblemConfig {
    pub qubits: usize,
    pub layers: usize,
    pub j: [f64; 3],
    pub h: [f64; 3],
}

impl Default for ProblemConfig {
    fn default() -> Self {
        Self {
            qubits: 5,
            layers: 3,
            j: [-1.0, 0.0, 0.0],
            h: [0.0, 0.0, -1.0],
        }
    }
}

impl ProblemConfig {
    pub fn build(&self) -> Result<VqeProblem, HarnessError> {
        let h = build_heisenberg(self.qubits, self.j, self.h)?;
        let c = build_efficient_su2(self.qubits, self.layers)?;
        Ok(VqeProblem::new(h, c)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalibrationConfig {
    pub points: usize,
    pub seed: u64,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            points: 30,
            seed: CALIBRATION_SEED,
        }
    }
}

fn default_budget() -> u64 {
    10_000_000
}

fn default_trials() -> usize {
    10
}

/// One JSON document describing a benchmark: a problem, a list of
/// optimizer variants and the shared trial settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub problem: ProblemConfig,
    pub methods: Vec<OptimizerConfig>,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default = "default_trials")]
    pub n_trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub noise_mode: NoiseMode,
    #[serde(default)]
    pub calibration: CalibrationConfig,
    /// Skips calibration when set.
    #[serde(default)]
    pub sigma_bar_sq: Option<f64>,
    /// CSV destination, relative to the working directory.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.budget == 0 {
            return fail("budget must be positive");
        }
        if self.n_trials == 0 {
            return fail("n_trials must be at least 1");
        }
        if self.methods.is_empty() {
            return fail("methods must list at least one optimizer");
        }
        if self.calibration.points == 0 && self.sigma_bar_sq.is_none() {
            return fail("calibration.points must be at least 1");
        }
        if let Some(s) = self.sigma_bar_sq {
            if !(s >= 0.0 && s.is_finite()) {
                return fail("sigma_bar_sq must be finite and non-negative");
            }
        }
        let mut labels: Vec<String> = self.methods.iter().map(|m| m.label()).collect();
        labels.sort();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return fail("method labels must be unique; set `label` to disambiguate");
        }
        if labels.iter().any(|l| l.contains([',', '"', '\n'])) {
            return fail("method labels may not contain commas, quotes or newlines");
        }
        Ok(())
    }
}
