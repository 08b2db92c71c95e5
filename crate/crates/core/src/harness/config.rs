//! Experiment plans and their validation.
//!
//! A plan is a JSON object. Fields and defaults:
//!
//! | field              | meaning                                             | default          |
//! |--------------------|-----------------------------------------------------|------------------|
//! | `study`            | `"temporal"` or `"spatial"`                          | required         |
//! | `case`             | initial datum, `"a"` (zero) or `"b"` (cosine)        | required         |
//! | `alpha`, `gamma`   | fractional orders                                   | required         |
//! | `m`                | noise decay exponent                                | required         |
//! | `epsilon`          | interface width                                     | 1 (a), 0.1 (b)   |
//! | `final_time`       | `T`                                                 | 0.01             |
//! | `resolutions`      | `N` values (temporal) or `M` values (spatial)        | required         |
//! | `reference`        | `N_ref` or `M_ref`                                  | required         |
//! | `fixed_resolution` | `M` (temporal) or `N` (spatial)                      | 256 / 100        |
//! | `truncation`       | retained noise modes `L`                            | see below        |
//! | `samples`          | Monte Carlo paths                                   | 100              |
//! | `seed`             | master seed                                         | 0                |
//! | `noise_amplitude`  | multiplies the noise; 0 gives a deterministic run   | 1                |
//! | `nonlinear`        | keep `φ(u) = u³ - u`                                | true             |
//! | `newton_tol`       | relative Newton residual tolerance                  | 1e-10            |
//! | `newton_max`       | Newton iteration cap                                | 50               |
//! | `policy`           | `"abort"` or `"drop"` on Newton failure             | `"abort"`        |
//!
//! The truncation defaults to `M - 1` for temporal studies and to
//! `min(resolutions) - 1` for spatial ones, so that it stays fixed across
//! the sweep.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::rates::{beta_eff, eta};
use crate::error::{Error, Result};
use crate::solver::{InitialCondition, DEFAULT_NEWTON_MAX, DEFAULT_NEWTON_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StudyKind {
    Temporal,
    Spatial,
}

impl FromStr for StudyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "temporal" => Ok(StudyKind::Temporal),
            "spatial" => Ok(StudyKind::Spatial),
            other => Err(Error::InvalidArgument(format!("unknown study {other:?}"))),
        }
    }
}

/// What to do with a sample whose Newton solve fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FailurePolicy {
    #[default]
    Abort,
    /// Drop the whole sample (all resolutions) and report the count.
    Drop,
}

impl FromStr for FailurePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "abort" => Ok(FailurePolicy::Abort),
            "drop" => Ok(FailurePolicy::Drop),
            other => Err(Error::InvalidArgument(format!("unknown policy {other:?}"))),
        }
    }
}

/// Initial datum as it appears in a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
}

impl Case {
    pub fn initial_condition(self) -> InitialCondition {
        match self {
            Case::A => InitialCondition::Zero,
            Case::B => InitialCondition::Cosine,
        }
    }

    pub fn default_epsilon(self) -> f64 {
        match self {
            Case::A => 1.0,
            Case::B => 0.1,
        }
    }
}

impl FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(Case::A),
            "b" => Ok(Case::B),
            other => Err(Error::InvalidArgument(format!("unknown case {other:?}"))),
        }
    }
}

fn default_final_time() -> f64 {
    0.01
}

fn default_samples() -> usize {
    100
}

fn default_amplitude() -> f64 {
    1.0
}

fn default_true() -> bool {
    true
}

fn default_newton_tol() -> f64 {
    DEFAULT_NEWTON_TOL
}

fn default_newton_max() -> usize {
    DEFAULT_NEWTON_MAX
}

/// One row of a convergence table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub study: StudyKind,
    pub case: Case,
    pub alpha: f64,
    pub gamma: f64,
    pub m: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default = "default_final_time")]
    pub final_time: f64,
    pub resolutions: Vec<usize>,
    pub reference: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_resolution: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_amplitude")]
    pub noise_amplitude: f64,
    #[serde(default = "default_true")]
    pub nonlinear: bool,
    #[serde(default = "default_newton_tol")]
    pub newton_tol: f64,
    #[serde(default = "default_newton_max")]
    pub newton_max: usize,
    #[serde(default)]
    pub policy: FailurePolicy,
}

impl ExperimentPlan {
    /// Plan with every optional field at its default.
    pub fn new(
        study: StudyKind,
        case: Case,
        alpha: f64,
        gamma: f64,
        m: u32,
        resolutions: Vec<usize>,
        reference: usize,
    ) -> Self {
        Self {
            study,
            case,
            alpha,
            gamma,
            m,
            epsilon: None,
            final_time: default_final_time(),
            resolutions,
            reference,
            fixed_resolution: None,
            truncation: None,
            samples: default_samples(),
            seed: 0,
            noise_amplitude: 1.0,
            nonlinear: true,
            newton_tol: DEFAULT_NEWTON_TOL,
            newton_max: DEFAULT_NEWTON_MAX,
            policy: FailurePolicy::Abort,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon.unwrap_or_else(|| self.case.default_epsilon())
    }

    /// `M` for temporal studies, `N` for spatial ones.
    pub fn fixed_resolution(&self) -> usize {
        self.fixed_resolution.unwrap_or(match self.study {
            StudyKind::Temporal => 256,
            StudyKind::Spatial => 100,
        })
    }

    pub fn truncation(&self) -> usize {
        self.truncation.unwrap_or_else(|| match self.study {
            StudyKind::Temporal => self.fixed_resolution().saturating_sub(1).max(1),
            StudyKind::Spatial => {
                let m = self.resolutions.iter().copied().min().unwrap_or(2);
                m.saturating_sub(1).max(1)
            }
        })
    }
}

/// Outcome of [`validate_config`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
    /// `η` at `β_eff(m)`.
    pub eta: f64,
}

impl Diagnostics {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    /// `Err(InvalidConfig)` when there are hard errors.
    pub fn into_result(self) -> Result<Vec<String>> {
        if self.errors.is_empty() {
            Ok(self.warnings)
        } else {
            Err(Error::InvalidConfig(self.errors))
        }
    }
}

pub fn validate_config(plan: &ExperimentPlan) -> Diagnostics {
    let mut d = Diagnostics::default();
    let e = &mut d.errors;
    if !(plan.alpha > 0.0 && plan.alpha <= 1.0) {
        e.push(format!("alpha must lie in (0, 1], got {}", plan.alpha));
    }
    if !(0.0..=1.0).contains(&plan.gamma) {
        e.push(format!("gamma must lie in [0, 1], got {}", plan.gamma));
    }
    if !(plan.epsilon() > 0.0) || !plan.epsilon().is_finite() {
        e.push(format!("epsilon must be positive, got {}", plan.epsilon()));
    }
    if !(plan.final_time > 0.0) || !plan.final_time.is_finite() {
        e.push(format!("final_time must be positive, got {}", plan.final_time));
    }
    if plan.samples < 1 {
        e.push("samples must be at least 1".into());
    }
    if !plan.noise_amplitude.is_finite() {
        e.push("noise_amplitude must be finite".into());
    }
    if !(plan.newton_tol > 0.0) || plan.newton_max < 1 {
        e.push("newton_tol must be positive and newton_max at least 1".into());
    }
    if plan.truncation() < 1 {
        e.push("truncation must be at least 1".into());
    }
    if plan.resolutions.is_empty() {
        e.push("resolutions must not be empty".into());
    }
    if plan.reference < 1 {
        e.push("reference must be positive".into());
    }
    let min_res = match plan.study {
        StudyKind::Temporal => 1,
        StudyKind::Spatial => 2,
    };
    for &r in &plan.resolutions {
        if r < min_res {
            e.push(format!("resolution {r} is below {min_res}"));
        } else if plan.reference >= 1 && plan.reference % r != 0 {
            e.push(format!("resolution {r} does not divide the reference {}", plan.reference));
        }
    }
    if plan.study == StudyKind::Temporal && plan.fixed_resolution() < 2 {
        e.push("the spatial mesh needs at least two elements".into());
    }
    if plan.study == StudyKind::Spatial && plan.fixed_resolution() < 1 {
        e.push("the time grid needs at least one step".into());
    }
    d.eta = eta(plan.alpha, plan.gamma, beta_eff(plan.m));
    if !(d.eta > 0.0) {
        d.warnings.push(format!(
            "eta = {:.4} <= 0 (alpha={}, gamma={}, beta_eff={}); the error bounds assume eta > 0",
            d.eta,
            plan.alpha,
            plan.gamma,
            beta_eff(plan.m)
        ));
    }
    if plan.alpha == 1.0 {
        d.warnings.push("alpha = 1 is the classical limit, admitted for validation only".into());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(alpha: f64, gamma: f64, m: u32) -> ExperimentPlan {
        ExperimentPlan::new(StudyKind::Temporal, Case::A, alpha, gamma, m, vec![20, 40, 80, 160], 1280)
    }

    #[test]
    fn eta_warning() {
        let d = validate_config(&plan(0.5, 0.3, 1));
        assert!(d.is_ok() && d.warnings.is_empty());
        assert!((d.eta - 0.17375).abs() < 1e-12);
        let d = validate_config(&plan(0.25, 0.0, 0));
        assert!(d.is_ok());
        assert!((d.eta + 0.344375).abs() < 1e-12);
        assert_eq!(d.warnings.len(), 1);
    }

    #[test]
    fn hard_errors() {
        assert!(!validate_config(&plan(0.5, 1.5, 1)).is_ok());
        assert!(!validate_config(&plan(0.0, 0.5, 1)).is_ok());
        let mut p = plan(0.5, 0.5, 1);
        p.resolutions.push(300);
        assert!(!validate_config(&p).is_ok());
        let mut p = plan(0.5, 0.5, 1);
        p.samples = 0;
        assert!(matches!(validate_config(&p).into_result(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn json_round_trip_and_defaults() {
        let text = r#"{"study":"spatial","case":"b","alpha":0.5,"gamma":0.6,"m":1,
                       "resolutions":[20,40],"reference":160}"#;
        let p = ExperimentPlan::from_json(text).unwrap();
        assert_eq!(p.epsilon(), 0.1);
        assert_eq!(p.fixed_resolution(), 100);
        assert_eq!(p.truncation(), 19);
        assert_eq!(p.samples, 100);
        assert_eq!(p.policy, FailurePolicy::Abort);
        assert_eq!(ExperimentPlan::from_json(&p.to_json().unwrap()).unwrap(), p);
        assert!(ExperimentPlan::from_json(r#"{"study":"temporal","bogus":1}"#).is_err());
        assert_eq!(plan(0.5, 0.5, 0).truncation(), 255);
    }
}
