//! Hand-built counterexamples with their reference values.
//!
//! The strong-Leibniz instance appears in the literature as
//! `f = (−0.3, 0.28, 0.38)`, but the reference values 0.57783 and 0.5417
//! are only reproduced by `f₁ = −0.36`. Both instances are kept: the
//! corrected one is compared against the reference digits, the printed one
//! is still a counterexample (with a larger gap).

use serde::Serialize;

use crate::measure::{Exponent, ProbVector};
use crate::operators::PiecewiseLinearFn;
use crate::report::{VerificationReport, INEQUALITY_TOLERANCE};
use crate::verify::{check_chain_rule, check_strong_leibniz};

pub const STRONG_LEIBNIZ_LHS: f64 = 0.57783;
pub const STRONG_LEIBNIZ_RHS: f64 = 0.5417;
pub const STRONG_LEIBNIZ_TOLERANCE: f64 = 5e-4;
pub const STRONG_LEIBNIZ_GAP: f64 = 0.0361;

pub const CHAIN_RULE_SPREAD: f64 = 0.244;
pub const CHAIN_RULE_LHS: f64 = 0.26;
pub const CHAIN_RULE_TOLERANCE: f64 = 1e-3;
pub const CHAIN_RULE_GAP: f64 = 0.016;

pub fn strong_leibniz_measure() -> ProbVector {
    ProbVector::from_masses(&[1.0, 27.0, 8.0]).expect("positive masses")
}

/// Instance that reproduces the reference values.
pub fn strong_leibniz_values() -> [f64; 3] {
    [-0.36, 0.28, 0.38]
}

/// Instance as printed alongside the reference values.
pub fn strong_leibniz_printed_values() -> [f64; 3] {
    [-0.3, 0.28, 0.38]
}

pub fn chain_rule_measure() -> ProbVector {
    ProbVector::from_masses(&[2.0, 9.0, 1.0]).expect("positive masses")
}

pub fn chain_rule_values() -> [f64; 3] {
    [-11.0 / 15.0, 1.0 / 15.0, 13.0 / 15.0]
}

/// `−(x + 11/15)` for `x ≤ 1/15`, `3x/5 − 21/25` beyond.
pub fn chain_rule_phi() -> PiecewiseLinearFn {
    PiecewiseLinearFn::new(vec![1.0 / 15.0], vec![-1.0, 3.0 / 5.0], -0.8)
        .expect("valid two-piece map")
}

/// A computed quantity next to its reference value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceValue {
    pub quantity: String,
    pub computed: f64,
    pub reference: f64,
    pub tolerance: f64,
}

impl ReferenceValue {
    fn new(quantity: &str, computed: f64, reference: f64, tolerance: f64) -> Self {
        Self { quantity: quantity.to_string(), computed, reference, tolerance }
    }

    pub fn matches(&self) -> bool {
        (self.computed - self.reference).abs() <= self.tolerance
    }
}

/// A known counterexample, its report and the values it should reproduce.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceExample {
    pub id: String,
    pub report: VerificationReport,
    pub references: Vec<ReferenceValue>,
}

impl ReferenceExample {
    /// The check failed, as a counterexample must.
    pub fn violation_confirmed(&self) -> bool {
        !self.report.pass
    }

    /// Every computed quantity lies within the tolerance of its reference
    /// (tolerances replaced by `override_tol` when given).
    pub fn values_match(&self, override_tol: Option<f64>) -> bool {
        self.references.iter().all(|r| {
            let tol = override_tol.unwrap_or(r.tolerance);
            (r.computed - r.reference).abs() <= tol
        })
    }
}

pub fn strong_leibniz_example() -> ReferenceExample {
    let report = check_strong_leibniz(
        &strong_leibniz_measure(),
        &strong_leibniz_values(),
        Exponent::ONE,
        INEQUALITY_TOLERANCE,
    )
    .expect("fixture is invertible")
    .expect_failure();
    let references = vec![
        ReferenceValue::new("spread_of_inverse", report.lhs, STRONG_LEIBNIZ_LHS, STRONG_LEIBNIZ_TOLERANCE),
        ReferenceValue::new("scaled_spread", report.rhs, STRONG_LEIBNIZ_RHS, STRONG_LEIBNIZ_TOLERANCE),
    ];
    ReferenceExample { id: "strong_leibniz_l1".into(), report, references }
}

/// The printed instance; it carries no reference digits of its own.
pub fn strong_leibniz_printed_example() -> ReferenceExample {
    let report = check_strong_leibniz(
        &strong_leibniz_measure(),
        &strong_leibniz_printed_values(),
        Exponent::ONE,
        INEQUALITY_TOLERANCE,
    )
    .expect("fixture is invertible")
    .expect_failure();
    ReferenceExample { id: "strong_leibniz_l1_printed".into(), report, references: Vec::new() }
}

pub fn chain_rule_example() -> ReferenceExample {
    let report = check_chain_rule(
        &chain_rule_measure(),
        &chain_rule_values(),
        &chain_rule_phi(),
        Exponent::ONE,
        INEQUALITY_TOLERANCE,
    )
    .expect("fixture dimensions")
    .expect_failure();
    let spread = report.details["spread_f"];
    let references = vec![
        ReferenceValue::new("spread_f", spread, CHAIN_RULE_SPREAD, CHAIN_RULE_TOLERANCE),
        ReferenceValue::new("spread_phi_f", report.lhs, CHAIN_RULE_LHS, CHAIN_RULE_TOLERANCE),
        ReferenceValue::new("lipschitz", report.details["lipschitz"], 1.0, 0.0),
    ];
    ReferenceExample { id: "chain_rule_l1".into(), report, references }
}

pub fn reference_examples() -> Vec<ReferenceExample> {
    vec![strong_leibniz_example(), strong_leibniz_printed_example(), chain_rule_example()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measures_match_fractions() {
        let m = strong_leibniz_measure();
        assert!((m.weights()[0] - 1.0 / 36.0).abs() < 1e-16);
        assert!((m.weights()[1] - 0.75).abs() < 1e-16);
        assert!((m.weights()[2] - 2.0 / 9.0).abs() < 1e-16);
        let m = chain_rule_measure();
        assert!((m.weights()[0] - 1.0 / 6.0).abs() < 1e-16);
        assert!((m.weights()[1] - 0.75).abs() < 1e-16);
        assert!((m.weights()[2] - 1.0 / 12.0).abs() < 1e-16);
    }

    #[test]
    fn phi_values_at_nodes() {
        let v = chain_rule_phi().apply(&chain_rule_values());
        let expected = [0.0, -0.8, -0.32];
        for (a, b) in v.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn printed_strong_leibniz_instance_still_fails() {
        let ex = strong_leibniz_printed_example();
        assert!(ex.violation_confirmed());
        assert!((ex.report.lhs - 0.600_981_620_7).abs() < 1e-9);
        assert!((ex.report.rhs - 0.532_249_937_0).abs() < 1e-9);
    }
}
