use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Direction of a function on the real line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Constant,
    Increasing,
    Decreasing,
    NonMonotone,
}

impl Monotonicity {
    pub fn is_monotone(self) -> bool {
        self != Monotonicity::NonMonotone
    }
}

/// Continuous piecewise-linear `φ: ℝ → ℝ`.
///
/// `slopes[0]` applies left of `breakpoints[0]`, `slopes[j]` on
/// `[breakpoints[j-1], breakpoints[j]]`, and the last slope to the right of
/// the last breakpoint. `anchor` is `φ(breakpoints[0])`, or `φ(0)` when there
/// are no breakpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPiecewise", into = "RawPiecewise")]
pub struct PiecewiseLinearFn {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    anchor: f64,
    knot_values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawPiecewise {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    anchor: f64,
}

impl TryFrom<RawPiecewise> for PiecewiseLinearFn {
    type Error = LabError;

    fn try_from(r: RawPiecewise) -> Result<Self> {
        PiecewiseLinearFn::new(r.breakpoints, r.slopes, r.anchor)
    }
}

impl From<PiecewiseLinearFn> for RawPiecewise {
    fn from(p: PiecewiseLinearFn) -> Self {
        RawPiecewise { breakpoints: p.breakpoints, slopes: p.slopes, anchor: p.anchor }
    }
}

impl PiecewiseLinearFn {
    pub fn new(breakpoints: Vec<f64>, slopes: Vec<f64>, anchor: f64) -> Result<Self> {
        if slopes.len() != breakpoints.len() + 1 {
            return Err(LabError::InvalidPiecewise(format!(
                "{} breakpoints need {} slopes, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                slopes.len()
            )));
        }
        if breakpoints
            .iter()
            .chain(&slopes)
            .chain(std::iter::once(&anchor))
            .any(|v| !v.is_finite())
        {
            return Err(LabError::InvalidPiecewise("non-finite parameter".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LabError::InvalidPiecewise(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        let mut knot_values = Vec::with_capacity(breakpoints.len());
        let mut value = anchor;
        for (j, b) in breakpoints.iter().enumerate() {
            if j > 0 {
                value += slopes[j] * (b - breakpoints[j - 1]);
            }
            knot_values.push(value);
        }
        Ok(Self { breakpoints, slopes, anchor, knot_values })
    }

    pub fn identity() -> Self {
        Self::linear(1.0, 0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::linear(0.0, c)
    }

    /// `x ↦ slope·x + intercept`.
    pub fn linear(slope: f64, intercept: f64) -> Self {
        Self::new(Vec::new(), vec![slope], intercept).expect("valid linear map")
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.breakpoints.is_empty() {
            return self.anchor + self.slopes[0] * x;
        }
        // Index of the first breakpoint strictly greater than x.
        let j = self.breakpoints.partition_point(|b| *b <= x);
        if j == 0 {
            self.anchor + self.slopes[0] * (x - self.breakpoints[0])
        } else {
            self.knot_values[j - 1] + self.slopes[j] * (x - self.breakpoints[j - 1])
        }
    }

    pub fn apply(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }

    /// Exact Lipschitz constant, `max |slope|`.
    pub fn lipschitz(&self) -> f64 {
        self.slopes.iter().fold(0.0_f64, |m, s| m.max(s.abs()))
    }

    pub fn monotonicity(&self) -> Monotonicity {
        let up = self.slopes.iter().any(|s| *s > 0.0);
        let down = self.slopes.iter().any(|s| *s < 0.0);
        match (up, down) {
            (false, false) => Monotonicity::Constant,
            (true, false) => Monotonicity::Increasing,
            (false, true) => Monotonicity::Decreasing,
            (true, true) => Monotonicity::NonMonotone,
        }
    }

    pub fn is_monotone(&self) -> bool {
        self.monotonicity().is_monotone()
    }

    /// `x ↦ −φ(x)`.
    pub fn negated(&self) -> Self {
        Self::new(
            self.breakpoints.clone(),
            self.slopes.iter().map(|s| -s).collect(),
            -self.anchor,
        )
        .expect("negation keeps validity")
    }
}
