//! Identity suites with per-check residuals, shared by the command line and the tests.

mod analytic;
mod jets;

pub use analytic::{
    brute_force_theta, fay_suite, gauss_suite, kernels_suite, quadratic_identity_ratios, random_jacobian_point,
    random_point, random_riemann_matrix, theta_suite,
};
pub use jets::jets_suite;

use serde::Serialize;
use std::fmt;
use std::str::FromStr;

use crate::curve::HyperellipticCurve;
use crate::kernels::KernelError;
use crate::theta::ThetaConfig;

/// Default series order for the exact suite.
pub const DEFAULT_JET_ORDER: usize = 16;
/// Default number of random cases for sampled identities.
pub const DEFAULT_CASES: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// `null` when the check could not be evaluated.
    pub residual: Option<f64>,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn residual(name: &str, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            passed: residual <= tolerance,
            residual: Some(residual),
            tolerance,
            detail: None,
        }
    }

    /// An exact identity: passes only on equality of every coefficient.
    pub fn exact(name: &str, agrees: bool, residual: f64) -> Self {
        Self {
            name: name.to_string(),
            passed: agrees,
            residual: Some(residual),
            tolerance: 0.0,
            detail: None,
        }
    }

    pub fn errored(name: &str, tolerance: f64, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed: false,
            residual: None,
            tolerance,
            detail: Some(detail),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Theta,
    Kernels,
    Fay,
    Jets,
    Gauss,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Theta, Suite::Kernels, Suite::Fay, Suite::Jets, Suite::Gauss];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Theta => "theta",
            Suite::Kernels => "kernels",
            Suite::Fay => "fay",
            Suite::Jets => "jets",
            Suite::Gauss => "gauss",
        }
    }

    pub fn needs_curve(&self) -> bool {
        matches!(self, Suite::Kernels | Suite::Fay | Suite::Gauss)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite '{s}' (expected theta, kernels, fay, jets or gauss)"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn new(suite: Suite, checks: Vec<Check>) -> Self {
        Self {
            suite,
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().filter_map(|c| c.residual).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Random cases for sampled identities.
    pub cases: usize,
    pub jet_order: usize,
    pub theta: ThetaConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            cases: DEFAULT_CASES,
            jet_order: DEFAULT_JET_ORDER,
            theta: ThetaConfig::default(),
        }
    }
}

/// Runs one suite. Curve suites need `curve`.
pub fn run_suite(
    suite: Suite,
    curve: Option<&HyperellipticCurve>,
    config: &VerifyConfig,
) -> Result<SuiteReport, KernelError> {
    let need = || {
        curve.ok_or_else(|| KernelError::InvalidArgument(format!("suite '{suite}' needs a curve")))
    };
    let checks = match suite {
        Suite::Theta => theta_suite(config)?,
        Suite::Jets => jets_suite(config.jet_order, config.seed),
        Suite::Kernels => kernels_suite(need()?, config)?,
        Suite::Fay => fay_suite(need()?, config)?,
        Suite::Gauss => gauss_suite(need()?, config)?,
    };
    Ok(SuiteReport::new(suite, checks))
}

#[cfg(test)]
mod tests;
