use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::measure::Exponent;
use crate::operators::PiecewiseLinearFn;

/// Default absolute slack tolerance for inequalities.
pub const INEQUALITY_TOLERANCE: f64 = 1e-9;
/// Default absolute tolerance for exact identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;

/// Everything needed to replay a check from JSON alone.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
    pub f: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<PiecewiseLinearFn>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub exponents: BTreeMap<String, Exponent>,
    /// Row-major `n × n` matrix, when the check consumed one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<String>,
}

impl Instance {
    pub fn new(f: &[f64]) -> Self {
        Self { f: f.to_vec(), ..Self::default() }
    }

    pub fn mu(mut self, mu: &[f64]) -> Self {
        self.mu = Some(mu.to_vec());
        self
    }

    pub fn g(mut self, g: &[f64]) -> Self {
        self.g = Some(g.to_vec());
        self
    }

    pub fn phi(mut self, phi: &PiecewiseLinearFn) -> Self {
        self.phi = Some(phi.clone());
        self
    }

    pub fn exponent(mut self, name: &str, p: Exponent) -> Self {
        self.exponents.insert(name.to_string(), p);
        self
    }

    pub fn matrix(mut self, row_major: Vec<f64>) -> Self {
        self.matrix = Some(row_major);
        self
    }

    pub fn norm(mut self, name: String) -> Self {
        self.norm = Some(name);
        self
    }
}

/// Result of checking one inequality or identity on one instance.
///
/// `pass` holds exactly when `slack = rhs − lhs ≥ −tolerance`. Identities
/// are reported with `lhs` = max deviation and `rhs` = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
    pub tolerance: f64,
    pub instance: Instance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Set on fixtures that are known counterexamples.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub expected_failure: bool,
    /// Named intermediate quantities, e.g. the two summands of a bound.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, f64>,
}

impl VerificationReport {
    pub fn inequality(name: &str, lhs: f64, rhs: f64, tolerance: f64, instance: Instance) -> Self {
        let slack = rhs - lhs;
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            slack,
            pass: slack >= -tolerance,
            tolerance,
            instance,
            seed: None,
            expected_failure: false,
            details: BTreeMap::new(),
        }
    }

    pub fn identity(name: &str, deviation: f64, tolerance: f64, instance: Instance) -> Self {
        Self::inequality(name, deviation, 0.0, tolerance, instance)
    }

    pub fn with_detail(mut self, key: &str, value: f64) -> Self {
        self.details.insert(key.to_string(), value);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn expect_failure(mut self) -> Self {
        self.expected_failure = true;
        self
    }

    /// `lhs − rhs`; positive means the inequality is violated.
    pub fn violation(&self) -> f64 {
        -self.slack
    }
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()))
}
