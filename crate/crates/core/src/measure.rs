//! Finite probability measures, weighted `ℓ^p` norms, centering, rearrangement
//! and weak majorization.
//!
//! Every measure here lives on `n` atoms with strictly positive mass, so the
//! `p = ∞` norm is the plain maximum of absolute values.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ensure_len, LabError, Result};

/// Absolute tolerance on `Σ μ_i = 1`.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// An `n`-point probability measure with strictly positive weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(LabError::Empty);
        }
        for (index, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(LabError::NonFinite { index });
            }
            if w <= 0.0 {
                return Err(LabError::InvalidProbability(format!(
                    "weight {index} is {w}, atoms must carry positive mass"
                )));
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(LabError::InvalidProbability(format!(
                "weights sum to {total}"
            )));
        }
        Ok(Self(weights))
    }

    /// Normalizes positive masses to total one.
    pub fn from_masses(masses: &[f64]) -> Result<Self> {
        let total: f64 = masses.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(LabError::InvalidProbability(format!(
                "masses sum to {total}"
            )));
        }
        Self::new(masses.iter().map(|m| m / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(LabError::Empty);
        }
        Ok(Self(vec![1.0 / n as f64; n]))
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min_mass(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl TryFrom<Vec<f64>> for ProbVector {
    type Error = LabError;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ProbVector> for Vec<f64> {
    fn from(p: ProbVector) -> Self {
        p.0
    }
}

/// An exponent in `[1, ∞]`. Infinity is stored as IEEE `+∞`, so the
/// convention `1/∞ = 0` is exact.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < 1.0 {
            return Err(LabError::InvalidExponent(value));
        }
        Ok(Self(value))
    }

    /// Builds the exponent whose reciprocal is `inv` (`inv = 0` gives `∞`).
    pub fn from_reciprocal(inv: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&inv) {
            return Err(LabError::InvalidExponent(1.0 / inv));
        }
        if inv == 0.0 {
            Ok(Self::INFINITY)
        } else {
            Self::new(1.0 / inv)
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn reciprocal(self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }

    /// Hölder conjugate `p*` with `1/p + 1/p* = 1`.
    pub fn conjugate(self) -> Self {
        Self::from_reciprocal(1.0 - self.reciprocal()).expect("conjugate of a valid exponent")
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl std::str::FromStr for Exponent {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Self::INFINITY),
            other => other
                .parse::<f64>()
                .map_err(|_| LabError::InvalidExponent(f64::NAN))
                .and_then(Self::new),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Exponent::new(v).map_err(serde::de::Error::custom),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Exponents `(r, p, q)` with `1/r = 1/p + 1/q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTriple", into = "RawTriple")]
pub struct HolderTriple {
    r: Exponent,
    p: Exponent,
    q: Exponent,
}

#[derive(Serialize, Deserialize)]
struct RawTriple {
    r: Exponent,
    p: Exponent,
    q: Exponent,
}

impl TryFrom<RawTriple> for HolderTriple {
    type Error = LabError;

    fn try_from(t: RawTriple) -> Result<Self> {
        HolderTriple::new(t.r, t.p, t.q)
    }
}

impl From<HolderTriple> for RawTriple {
    fn from(t: HolderTriple) -> Self {
        RawTriple { r: t.r, p: t.p, q: t.q }
    }
}

impl HolderTriple {
    pub const TOLERANCE: f64 = 1e-12;

    pub fn new(r: Exponent, p: Exponent, q: Exponent) -> Result<Self> {
        if (r.reciprocal() - p.reciprocal() - q.reciprocal()).abs() > Self::TOLERANCE {
            return Err(LabError::InvalidHolderTriple {
                r: r.value(),
                p: p.value(),
                q: q.value(),
            });
        }
        Ok(Self { r, p, q })
    }

    /// Completes `(p, q)` to a triple; fails when `1/p + 1/q > 1`.
    pub fn from_pq(p: Exponent, q: Exponent) -> Result<Self> {
        let inv = p.reciprocal() + q.reciprocal();
        if inv > 1.0 + Self::TOLERANCE {
            return Err(LabError::InvalidHolderTriple {
                r: 1.0 / inv,
                p: p.value(),
                q: q.value(),
            });
        }
        let r = Exponent::from_reciprocal(inv.min(1.0))?;
        Ok(Self { r, p, q })
    }

    /// Splits `r` so that `1/p = share/r` and `1/q = (1 - share)/r`.
    pub fn split(r: Exponent, share: f64) -> Result<Self> {
        let share = share.clamp(0.0, 1.0);
        let p = Exponent::from_reciprocal(share * r.reciprocal())?;
        let q = Exponent::from_reciprocal((1.0 - share) * r.reciprocal())?;
        Ok(Self { r, p, q })
    }

    pub fn r(&self) -> Exponent {
        self.r
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    pub fn q(&self) -> Exponent {
        self.q
    }
}

pub(crate) fn ensure_finite(x: &[f64]) -> Result<()> {
    match x.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(LabError::NonFinite { index }),
        None => Ok(()),
    }
}

/// `E_μ x = Σ μ_i x_i`.
pub fn expectation(x: &[f64], mu: &ProbVector) -> Result<f64> {
    ensure_len(mu.len(), x.len())?;
    Ok(x.iter().zip(mu.weights()).map(|(a, m)| a * m).sum())
}

/// `x − E_μ(x)·1`.
pub fn center(x: &[f64], mu: &ProbVector) -> Result<Vec<f64>> {
    let mean = expectation(x, mu)?;
    Ok(x.iter().map(|v| v - mean).collect())
}

/// Weighted `ℓ^p(μ)` norm.
pub fn lp_norm(x: &[f64], mu: &ProbVector, p: Exponent) -> Result<f64> {
    ensure_len(mu.len(), x.len())?;
    Ok(weighted_norm(x, mu.weights(), p))
}

/// `ℓ^p` norm under the uniform probability measure on `x.len()` atoms.
pub fn lp_norm_uniform(x: &[f64], p: Exponent) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let w = 1.0 / x.len() as f64;
    let peak = max_abs(x);
    if p.is_infinite() || peak == 0.0 {
        return peak;
    }
    let pv = p.value();
    let s: f64 = x.iter().map(|v| w * (v.abs() / peak).powf(pv)).sum();
    peak * s.powf(1.0 / pv)
}

/// Plain counting `ℓ^p` norm on `ℝⁿ`.
pub fn lp_norm_counting(x: &[f64], p: Exponent) -> f64 {
    let peak = max_abs(x);
    if p.is_infinite() || peak == 0.0 {
        return peak;
    }
    let pv = p.value();
    let s: f64 = x.iter().map(|v| (v.abs() / peak).powf(pv)).sum();
    peak * s.powf(1.0 / pv)
}

pub(crate) fn weighted_norm(x: &[f64], weights: &[f64], p: Exponent) -> f64 {
    let peak = max_abs(x);
    if p.is_infinite() || peak == 0.0 {
        return peak;
    }
    let pv = p.value();
    if pv == 1.0 {
        return x.iter().zip(weights).map(|(v, m)| m * v.abs()).sum();
    }
    // Scaling by the peak keeps large p from underflowing.
    let s: f64 = x
        .iter()
        .zip(weights)
        .map(|(v, m)| m * (v.abs() / peak).powf(pv))
        .sum();
    peak * s.powf(1.0 / pv)
}

/// `‖x − E_μ x‖_{ℓ^p(μ)}` without materializing the centered vector.
pub fn centered_lp_norm(x: &[f64], mu: &ProbVector, p: Exponent) -> Result<f64> {
    ensure_len(mu.len(), x.len())?;
    Ok(centered_norm(x, mu.weights(), p))
}

pub(crate) fn centered_norm(x: &[f64], weights: &[f64], p: Exponent) -> f64 {
    let mean: f64 = x.iter().zip(weights).map(|(v, m)| v * m).sum();
    let peak = x.iter().fold(0.0_f64, |acc, v| acc.max((v - mean).abs()));
    if p.is_infinite() || peak == 0.0 {
        return peak;
    }
    let pv = p.value();
    if pv == 1.0 {
        return x.iter().zip(weights).map(|(v, m)| m * (v - mean).abs()).sum();
    }
    let s: f64 = x
        .iter()
        .zip(weights)
        .map(|(v, m)| m * ((v - mean).abs() / peak).powf(pv))
        .sum();
    peak * s.powf(1.0 / pv)
}

pub(crate) fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// `Var_μ(x) = E_μ |x − E_μ x|²`.
pub fn variance(x: &[f64], mu: &ProbVector) -> Result<f64> {
    let c = center(x, mu)?;
    Ok(c.iter().zip(mu.weights()).map(|(v, m)| m * v * v).sum())
}

/// Non-increasing rearrangement; ties keep their original order.
pub fn downward_rearrange(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Absolute values sorted non-increasingly, `|x|↓`.
pub fn abs_rearranged(x: &[f64]) -> Vec<f64> {
    let abs: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    downward_rearrange(&abs)
}

/// `x ≺_w y`: every partial sum of `x↓` is at most the matching partial sum
/// of `y↓` plus `tol`.
pub fn weak_majorizes(y: &[f64], x: &[f64], tol: f64) -> Result<bool> {
    Ok(majorization_gap(y, x)? <= tol)
}

/// Largest excess `Σ_{i≤k} x↓_i − Σ_{i≤k} y↓_i` over `k`; non-positive
/// exactly when `x ≺_w y`.
pub fn majorization_gap(y: &[f64], x: &[f64]) -> Result<f64> {
    ensure_len(y.len(), x.len())?;
    let xs = downward_rearrange(x);
    let ys = downward_rearrange(y);
    let (mut sx, mut sy) = (0.0, 0.0);
    let mut gap = f64::NEG_INFINITY;
    for (a, b) in xs.iter().zip(&ys) {
        sx += a;
        sy += b;
        gap = gap.max(sx - sy);
    }
    Ok(if gap.is_finite() { gap } else { 0.0 })
}
