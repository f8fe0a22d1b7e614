use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::adam::AdamParams;
use super::kappa::KappaSchedule;
use crate::error::OptError;
use crate::gp::KernelParams;

/// Optimization algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// SGD with the classical shift rule.
    SgdPsr,
    /// SGD with the GP derivative over a sliding window of observations.
    BayesSgd,
    /// SGD with GP derivatives and adaptive shot allocation.
    Gradcore,
    /// Sequential minimal optimization with 1D trigonometric fits.
    Nft,
    /// SMO with the 1D subspace minimized under a global GP.
    BayesNft,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::SgdPsr,
        Method::BayesSgd,
        Method::Gradcore,
        Method::Nft,
        Method::BayesNft,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::SgdPsr => "sgd-psr",
            Method::BayesSgd => "bayes-sgd",
            Method::Gradcore => "gradcore",
            Method::Nft => "nft",
            Method::BayesNft => "bayes-nft",
        }
    }

    /// Whether every observation uses the configured `n_shots`.
    pub fn fixed_shots(self) -> bool {
        self != Method::Gradcore
    }

    pub fn is_smo(self) -> bool {
        matches!(self, Method::Nft | Method::BayesNft)
    }

    fn uses_gp(self) -> bool {
        matches!(self, Method::BayesSgd | Method::Gradcore | Method::BayesNft)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = OptError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| OptError::Config(format!("unknown method {s:?}")))
    }
}

/// Threshold schedule expressed in shot-equivalents of `sigma_bar_sq`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KappaParams {
    /// `kappa0^2 = sigma_bar_sq / corethresh`.
    pub corethresh: f64,
    /// `c0 = sigma_bar_sq / coremin_scale`.
    pub coremin_scale: f64,
    pub c1: f64,
    /// Steps at the initial threshold; defaults to `D`.
    pub t_initial: Option<usize>,
}

impl Default for KappaParams {
    fn default() -> Self {
        Self {
            corethresh: 256.0,
            coremin_scale: 2048.0,
            c1: 1.2,
            t_initial: None,
        }
    }
}

fn default_sigma0_sq() -> f64 {
    100.0
}

fn default_window_r() -> usize {
    5
}

fn default_noise_grid() -> usize {
    64
}

/// Per-method optimizer settings. Fields irrelevant to a method are ignored,
/// except `n_shots`, which must be set exactly for the fixed-shot methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub method: Method,
    /// Series name in records; defaults to `method@n_shots` or `method`.
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub n_shots: Option<u64>,
    /// Defaults to 9 for gradcore and bayes-nft, 1 for bayes-sgd.
    #[serde(default)]
    pub gamma_sq: Option<f64>,
    #[serde(default = "default_sigma0_sq")]
    pub sigma0_sq: f64,
    /// Shift `alpha`; defaults to pi/2 for SGD methods and 2pi/3 for SMO.
    #[serde(default)]
    pub shift: Option<f64>,
    #[serde(default)]
    pub adam: AdamParams,
    /// Window multiplier `R`; the GP keeps `R * sum_d 2 V_d` observations.
    #[serde(default = "default_window_r")]
    pub window_r: usize,
    /// Overrides the window size derived from `window_r`.
    #[serde(default)]
    pub window_limit: Option<usize>,
    #[serde(default)]
    pub kappa: KappaParams,
    /// Number of candidate noise levels in the shot selection search.
    #[serde(default = "default_noise_grid")]
    pub noise_grid: usize,
    /// Give every point of a step the largest per-axis shot count.
    #[serde(default)]
    pub uniform_shots: bool,
    /// SMO steps between center re-measurements; defaults to `D + 1`, 0 disables.
    #[serde(default)]
    pub center_interval: Option<usize>,
    #[serde(default)]
    pub max_steps: Option<usize>,
}

impl OptimizerConfig {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            label: None,
            n_shots: None,
            gamma_sq: None,
            sigma0_sq: default_sigma0_sq(),
            shift: None,
            adam: AdamParams::default(),
            window_r: default_window_r(),
            window_limit: None,
            kappa: KappaParams::default(),
            noise_grid: default_noise_grid(),
            uniform_shots: false,
            center_interval: None,
            max_steps: None,
        }
    }

    /// Convenience constructor for the fixed-shot methods.
    pub fn with_shots(method: Method, n_shots: u64) -> Self {
        Self {
            n_shots: Some(n_shots),
            ..Self::new(method)
        }
    }

    pub fn label(&self) -> String {
        match (&self.label, self.n_shots) {
            (Some(l), _) => l.clone(),
            (None, Some(n)) if self.method.fixed_shots() => format!("{}@{n}", self.method),
            _ => self.method.to_string(),
        }
    }

    pub fn gamma_sq(&self) -> f64 {
        self.gamma_sq.unwrap_or(match self.method {
            Method::BayesSgd => 1.0,
            _ => 9.0,
        })
    }

    pub fn shift(&self) -> f64 {
        self.shift.unwrap_or(if self.method.is_smo() { 2.0 * PI / 3.0 } else { FRAC_PI_2 })
    }

    pub fn kernel_params(&self, multiplicities: &[usize]) -> Result<KernelParams, OptError> {
        Ok(KernelParams::new(self.gamma_sq(), self.sigma0_sq, multiplicities.to_vec())?)
    }

    /// Number of stored observations the GP keeps.
    pub fn window(&self, multiplicities: &[usize]) -> usize {
        let sweep: usize = multiplicities.iter().map(|v| 2 * v).sum();
        self.window_limit.unwrap_or(self.window_r * sweep)
    }

    pub fn schedule(&self, sigma_bar_sq: f64, dim: usize) -> Result<KappaSchedule, OptError> {
        KappaSchedule::new(
            sigma_bar_sq / self.kappa.coremin_scale,
            self.kappa.c1,
            self.kappa.t_initial.unwrap_or(dim),
            sigma_bar_sq / self.kappa.corethresh,
        )
    }

    pub fn center_interval(&self, dim: usize) -> usize {
        self.center_interval.unwrap_or(dim + 1)
    }

    /// Fixed shot count, or an error for methods that need one.
    pub(crate) fn shots(&self) -> Result<u64, OptError> {
        self.n_shots
            .ok_or_else(|| OptError::Config(format!("{} requires n_shots", self.method)))
    }

    /// Checks settings against a problem with the given multiplicities.
    pub fn validate(&self, multiplicities: &[usize], sigma_bar_sq: f64) -> Result<(), OptError> {
        let fail = |msg: String| Err(OptError::Config(msg));
        match (self.method.fixed_shots(), self.n_shots) {
            (true, None) => return fail(format!("{} requires n_shots", self.method)),
            (true, Some(0)) => return fail("n_shots must be at least 1".into()),
            (false, Some(_)) => return fail(format!("{} chooses its own shot counts; remove n_shots", self.method)),
            _ => {}
        }
        if !(sigma_bar_sq >= 0.0 && sigma_bar_sq.is_finite()) {
            return fail(format!("sigma_bar_sq must be finite and non-negative, got {sigma_bar_sq}"));
        }
        if self.method.uses_gp() {
            self.kernel_params(multiplicities)?;
        }
        let alpha = self.shift();
        // the shift is only used on axes with V_d = 1
        if multiplicities.contains(&1) && !(alpha.is_finite() && alpha.sin().abs() > 1e-8) {
            return fail(format!("shift {alpha} must not be a multiple of pi"));
        }
        let adam = self.adam;
        if !(adam.learning_rate > 0.0 && (0.0..1.0).contains(&adam.beta1) && (0.0..1.0).contains(&adam.beta2) && adam.epsilon > 0.0) {
            return fail("ADAM needs learning_rate > 0, betas in [0, 1) and epsilon > 0".into());
        }
        if self.method == Method::Gradcore {
            if !(sigma_bar_sq > 0.0) {
                return fail("gradcore needs a positive calibrated sigma_bar_sq".into());
            }
            if self.noise_grid == 0 {
                return fail("noise_grid must be at least 1".into());
            }
            let k = self.kappa;
            if !(k.corethresh > 0.0 && k.coremin_scale > 0.0 && k.c1 > 0.0) {
                return fail("kappa parameters must be positive".into());
            }
        }
        if self.method == Method::BayesNft && self.window(multiplicities) == 0 {
            return fail("bayes-nft needs a positive window".into());
        }
        Ok(())
    }
}
