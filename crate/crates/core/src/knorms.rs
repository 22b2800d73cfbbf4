//! Vector k-norms, weighted vector k-norms and their dual norms.
//!
//! The dual of `‖·‖_(k)^w` has a closed form as a maximum of `n` ratios of
//! k-norms to partial weight sums. [`dual_norm_bruteforce`] recomputes it
//! independently by maximizing `⟨x, y⟩` over the finite candidate set that
//! contains every extreme point of the unit ball.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_len, LabError, Result};
use crate::measure::{abs_rearranged, lp_norm_counting, majorization_gap, Exponent};

/// Largest `n` for which extreme-point candidates are enumerated.
pub const ENUMERATION_CAP: usize = 12;

/// Positive, non-increasing weights `w_1 ≥ … ≥ w_n > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(LabError::Empty);
        }
        if let Some(i) = w.iter().position(|v| !v.is_finite() || *v <= 0.0) {
            return Err(LabError::InvalidWeights(format!(
                "w[{i}] = {} is not a positive number",
                w[i]
            )));
        }
        if let Some(i) = w.windows(2).position(|p| p[0] < p[1]) {
            return Err(LabError::InvalidWeights(format!(
                "w[{i}] = {} < w[{}] = {}",
                w[i],
                i + 1,
                w[i + 1]
            )));
        }
        Ok(Self(w))
    }

    pub fn ones(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `w_1 + … + w_j`.
    pub fn partial_sum(&self, j: usize) -> f64 {
        self.0[..j].iter().sum()
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = LabError;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.0
    }
}

fn ensure_rank(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(LabError::RankOutOfRange { k, n });
    }
    Ok(())
}

/// Sum of the `k` largest absolute entries.
pub fn k_norm(x: &[f64], k: usize) -> Result<f64> {
    ensure_rank(k, x.len())?;
    Ok(abs_rearranged(x)[..k].iter().sum())
}

/// `Σ_{i≤k} w_i |x|↓_i`.
pub fn weighted_k_norm(x: &[f64], w: &WeightVector, k: usize) -> Result<f64> {
    ensure_len(w.len(), x.len())?;
    ensure_rank(k, x.len())?;
    let sorted = abs_rearranged(x);
    Ok(sorted[..k].iter().zip(w.as_slice()).map(|(a, b)| a * b).sum())
}

/// Closed-form dual of the weighted k-norm:
/// `max{‖x‖_(1)/W_1, …, ‖x‖_(k−1)/W_{k−1}, ‖x‖_(n)/W_k}` with
/// `W_j = w_1 + … + w_j`. For `k = 1` only the last ratio remains.
pub fn dual_weighted_k_norm(x: &[f64], w: &WeightVector, k: usize) -> Result<f64> {
    ensure_len(w.len(), x.len())?;
    ensure_rank(k, x.len())?;
    let sorted = abs_rearranged(x);
    let weights = w.as_slice();
    let (mut head, mut wsum) = (0.0, 0.0);
    let mut best = 0.0_f64;
    for j in 0..k - 1 {
        head += sorted[j];
        wsum += weights[j];
        best = best.max(head / wsum);
    }
    let total: f64 = sorted.iter().sum();
    Ok(best.max(total / w.partial_sum(k)))
}

/// Candidate extreme points of the unit ball of `‖·‖_(k)^w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremePointSet {
    pub points: Vec<Vec<f64>>,
    pub k: usize,
    pub w: WeightVector,
}

/// Calls `visit` on every signed indicator `Σ_{i∈S} ±e_i` scaled by
/// `1 / W_{min(k,|S|)}`, for `1 ≤ |S| ≤ k−1` and `|S| = n`.
fn for_each_candidate(w: &WeightVector, k: usize, mut visit: impl FnMut(&[f64])) -> Result<()> {
    let n = w.len();
    ensure_rank(k, n)?;
    if n > ENUMERATION_CAP {
        return Err(LabError::EnumerationCap { n, cap: ENUMERATION_CAP });
    }
    let mut point = vec![0.0; n];
    let mut support = Vec::with_capacity(n);
    for mask in 1u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if !(size < k || size == n) {
            continue;
        }
        let scale = 1.0 / w.partial_sum(size.min(k));
        support.clear();
        support.extend((0..n).filter(|i| mask & (1 << i) != 0));
        for signs in 0u32..(1u32 << size) {
            point.iter_mut().for_each(|v| *v = 0.0);
            for (bit, &i) in support.iter().enumerate() {
                point[i] = if signs & (1 << bit) != 0 { -scale } else { scale };
            }
            visit(&point);
        }
    }
    Ok(())
}

/// Materializes the candidate set. Distinct `(S, signs)` pairs give distinct
/// points, so the list carries no duplicates.
pub fn extreme_point_candidates(w: &WeightVector, k: usize) -> Result<ExtremePointSet> {
    let mut points = Vec::new();
    for_each_candidate(w, k, |p| points.push(p.to_vec()))?;
    Ok(ExtremePointSet { points, k, w: w.clone() })
}

/// Dual norm by exhaustive maximization of `⟨x, y⟩` over the candidates.
pub fn dual_norm_bruteforce(x: &[f64], w: &WeightVector, k: usize) -> Result<f64> {
    ensure_len(w.len(), x.len())?;
    let mut best = 0.0_f64;
    for_each_candidate(w, k, |y| {
        let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        best = best.max(dot);
    })?;
    Ok(best)
}

/// A symmetric norm on `ℝⁿ`: invariant under permutations and sign flips.
pub trait SymmetricNorm: Send + Sync {
    fn name(&self) -> String;
    fn eval(&self, x: &[f64]) -> f64;
}

/// Counting-measure `ℓ^p` norm.
#[derive(Debug, Clone, Copy)]
pub struct LpNorm(pub Exponent);

impl SymmetricNorm for LpNorm {
    fn name(&self) -> String {
        format!("l{}", self.0)
    }

    fn eval(&self, x: &[f64]) -> f64 {
        lp_norm_counting(x, self.0)
    }
}

/// Ky Fan k-norm; `k` is clamped to the vector length.
#[derive(Debug, Clone, Copy)]
pub struct KNorm(pub usize);

impl SymmetricNorm for KNorm {
    fn name(&self) -> String {
        format!("k{}", self.0)
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let k = self.0.clamp(1, x.len().max(1));
        abs_rearranged(x).iter().take(k).sum()
    }
}

#[derive(Debug, Clone)]
pub struct WeightedKNorm {
    pub w: WeightVector,
    pub k: usize,
}

impl SymmetricNorm for WeightedKNorm {
    fn name(&self) -> String {
        format!("wk{}", self.k)
    }

    fn eval(&self, x: &[f64]) -> f64 {
        weighted_k_norm(x, &self.w, self.k).expect("weighted k-norm dimensions")
    }
}

#[derive(Debug, Clone)]
pub struct DualWeightedKNorm {
    pub w: WeightVector,
    pub k: usize,
}

impl SymmetricNorm for DualWeightedKNorm {
    fn name(&self) -> String {
        format!("wk{}*", self.k)
    }

    fn eval(&self, x: &[f64]) -> f64 {
        dual_weighted_k_norm(x, &self.w, self.k).expect("dual weighted k-norm dimensions")
    }
}

/// Wraps any closure as a named symmetric norm. The closure must actually be
/// symmetric; nothing checks it.
pub struct FnNorm<F> {
    pub name: String,
    pub f: F,
}

impl<F> SymmetricNorm for FnNorm<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn name(&self) -> String {
        self.name.clone()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// `ℓ^p` for `p ∈ {1, 1.5, 2, 3, ∞}` together with every k-norm on `ℝⁿ`.
pub fn standard_norm_family(n: usize) -> Vec<Box<dyn SymmetricNorm>> {
    let mut family: Vec<Box<dyn SymmetricNorm>> = [1.0, 1.5, 2.0, 3.0, f64::INFINITY]
        .into_iter()
        .map(|p| Box::new(LpNorm(Exponent::new(p).unwrap())) as Box<dyn SymmetricNorm>)
        .collect();
    for k in 1..=n {
        family.push(Box::new(KNorm(k)));
    }
    family
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormComparison {
    pub norm: String,
    pub x_norm: f64,
    pub y_norm: f64,
}

/// Outcome of a Ky Fan dominance check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KyFanOutcome {
    /// `|x| ≺_w |y|`.
    pub dominated: bool,
    pub comparisons: Vec<NormComparison>,
}

impl KyFanOutcome {
    /// When `|x| ≺_w |y|`, every supplied norm must satisfy `‖x‖ ≤ ‖y‖ + tol`.
    pub fn consistent(&self, tol: f64) -> bool {
        !self.dominated || self.comparisons.iter().all(|c| c.x_norm <= c.y_norm + tol)
    }
}

/// Tests `|x| ≺_w |y|` and, when it holds, evaluates every norm on both
/// vectors so the caller can confirm `‖x‖ ≤ ‖y‖`.
pub fn ky_fan_dominates(
    y: &[f64],
    x: &[f64],
    norms: &[&dyn SymmetricNorm],
    tol: f64,
) -> Result<KyFanOutcome> {
    ensure_len(y.len(), x.len())?;
    let ay: Vec<f64> = y.iter().map(|v| v.abs()).collect();
    let ax: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    let dominated = majorization_gap(&ay, &ax)? <= tol;
    let comparisons = if dominated {
        norms
            .iter()
            .map(|nrm| NormComparison {
                norm: nrm.name(),
                x_norm: nrm.eval(x),
                y_norm: nrm.eval(y),
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(KyFanOutcome { dominated, comparisons })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[f64]) -> WeightVector {
        WeightVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn weight_vector_validation() {
        assert!(WeightVector::new(vec![1.0, 2.0]).is_err());
        assert!(WeightVector::new(vec![1.0, 0.0]).is_err());
        assert!(WeightVector::new(vec![2.0, 2.0, 1.0]).is_ok());
    }

    #[test]
    fn k_norm_examples() {
        let x = [3.0, -1.0, 2.0];
        assert_eq!(k_norm(&x, 2).unwrap(), 5.0);
        assert_eq!(k_norm(&x, 1).unwrap(), 3.0);
        assert_eq!(k_norm(&x, 3).unwrap(), 6.0);
        assert!(matches!(k_norm(&x, 0), Err(LabError::RankOutOfRange { .. })));
        assert!(matches!(k_norm(&x, 4), Err(LabError::RankOutOfRange { .. })));
    }

    #[test]
    fn weighted_k_norm_examples() {
        assert_eq!(weighted_k_norm(&[3.0, 1.0], &w(&[2.0, 1.0]), 2).unwrap(), 7.0);
        let x = [0.5, -4.0, 2.0, 1.0];
        for k in 1..=4 {
            assert_eq!(
                weighted_k_norm(&x, &WeightVector::ones(4).unwrap(), k).unwrap(),
                k_norm(&x, k).unwrap()
            );
        }
        assert!(weighted_k_norm(&[1.0], &w(&[1.0, 1.0]), 1).is_err());
    }

    #[test]
    fn dual_examples() {
        let d = dual_weighted_k_norm(&[3.0, 1.0], &w(&[2.0, 1.0]), 2).unwrap();
        assert!((d - 1.5).abs() < 1e-15);
        let b = dual_norm_bruteforce(&[3.0, 1.0], &w(&[2.0, 1.0]), 2).unwrap();
        assert!((b - 1.5).abs() < 1e-15);
        // k = 1 is the dual of w_1·‖·‖_∞.
        let d1 = dual_weighted_k_norm(&[1.0, -2.0, 3.0], &w(&[4.0, 2.0, 1.0]), 1).unwrap();
        assert!((d1 - 1.5).abs() < 1e-15);
        assert_eq!(dual_norm_bruteforce(&[0.0; 4], &w(&[1.0; 4]), 2).unwrap(), 0.0);
        for k in 1..=4 {
            let e1 = [1.0, 0.0, 0.0, 0.0];
            assert_eq!(dual_norm_bruteforce(&e1, &w(&[1.0; 4]), k).unwrap(), 1.0);
        }
    }

    #[test]
    fn ones_weight_dual_is_max_of_sup_and_scaled_l1() {
        let x = [0.3, -2.0, 0.7, 1.1, -0.2];
        let ones = WeightVector::ones(5).unwrap();
        for k in 1..=5 {
            let linf = 2.0_f64;
            let l1: f64 = x.iter().map(|v: &f64| v.abs()).sum();
            let expected = linf.max(l1 / k as f64);
            let d = dual_weighted_k_norm(&x, &ones, k).unwrap();
            assert!((d - expected).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn candidates_k1_use_full_support_only() {
        let set = extreme_point_candidates(&w(&[2.0, 1.0, 0.5]), 1).unwrap();
        assert_eq!(set.points.len(), 8);
        for p in &set.points {
            assert!(p.iter().all(|v| (v.abs() - 0.5).abs() < 1e-15));
        }
    }

    #[test]
    fn candidates_have_unit_weighted_norm() {
        let wv = w(&[3.0, 2.0, 2.0, 1.0, 0.5]);
        for k in 1..=5 {
            let set = extreme_point_candidates(&wv, k).unwrap();
            for p in &set.points {
                let v = weighted_k_norm(p, &wv, k).unwrap();
                assert!((v - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn candidate_count_and_cap() {
        // n = 4, k = 3: |S| ∈ {1, 2, 4} → 4·2 + 6·4 + 16.
        let set = extreme_point_candidates(&WeightVector::ones(4).unwrap(), 3).unwrap();
        assert_eq!(set.points.len(), 8 + 24 + 16);
        let big = WeightVector::ones(13).unwrap();
        assert!(matches!(
            extreme_point_candidates(&big, 2),
            Err(LabError::EnumerationCap { .. })
        ));
        assert!(dual_norm_bruteforce(&[0.0; 13], &big, 2).is_err());
    }

    #[test]
    fn ky_fan_examples() {
        let family = standard_norm_family(3);
        let refs: Vec<&dyn SymmetricNorm> = family.iter().map(|b| b.as_ref()).collect();
        let x = [1.0, -2.0, 0.5];
        let same = ky_fan_dominates(&x, &x, &refs, 1e-12).unwrap();
        assert!(same.dominated && same.consistent(0.0));
        assert!(same.comparisons.iter().all(|c| c.x_norm == c.y_norm));
        let fails = ky_fan_dominates(&[1.0, 1.0, 1.0], &[2.0, 0.0, 0.0], &refs, 0.0).unwrap();
        assert!(!fails.dominated);
        let spread = ky_fan_dominates(&[2.0, 0.0, 0.0], &[1.0, 1.0, 0.0], &refs, 0.0).unwrap();
        assert!(spread.dominated && spread.consistent(1e-12));
    }
}
