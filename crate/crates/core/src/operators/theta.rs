use nalgebra::DMatrix;

use super::{laplacian::LaplacianMatrix, mat_vec, row_major, zero_row_sums, Monotonicity};
use super::PiecewiseLinearFn;
use crate::error::{ensure_len, LabError, Result};
use crate::report::{max_abs_diff, Instance, VerificationReport, IDENTITY_TOLERANCE};

/// `Θ_x`: off-diagonal `(x_i + x_j)/(2n)`, diagonal chosen so rows sum to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaMatrix {
    pub entries: DMatrix<f64>,
    pub source: Vec<f64>,
}

impl ThetaMatrix {
    pub fn apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        ensure_len(self.source.len(), y.len())?;
        Ok(mat_vec(&self.entries, y))
    }

    pub fn n(&self) -> usize {
        self.source.len()
    }
}

pub fn theta_matrix(x: &[f64]) -> ThetaMatrix {
    let n = x.len();
    let scale = 1.0 / (2.0 * n as f64);
    let mut m = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { scale * (x[i] + x[j]) });
    zero_row_sums(&mut m);
    ThetaMatrix { entries: m, source: x.to_vec() }
}

/// `Θ_x − n⁻¹ 1 xᵀ`; applied to `y` it gives `Θ_x y − (⟨x,y⟩/n)·1`.
pub fn deflated_theta(x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let theta = theta_matrix(x).entries;
    let inv_n = 1.0 / n as f64;
    DMatrix::from_fn(n, n, |i, j| theta[(i, j)] - inv_n * x[j])
}

/// `Θ[x;φ]` together with the direction of `φ` on the sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct DividedDifferenceMatrix {
    pub entries: DMatrix<f64>,
    pub monotonicity: Monotonicity,
}

impl DividedDifferenceMatrix {
    /// Classifies as a Laplacian. A decreasing `φ` is flipped first, since
    /// `Θ[x;−φ] = −Θ[x;φ]` and every norm statement is sign-invariant.
    pub fn as_laplacian(&self) -> Result<LaplacianMatrix> {
        match self.monotonicity {
            Monotonicity::Decreasing => LaplacianMatrix::new(-&self.entries),
            _ => LaplacianMatrix::new(self.entries.clone()),
        }
    }

    pub fn max_off_diagonal_abs(&self) -> f64 {
        let n = self.entries.nrows();
        let mut best = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    best = best.max(self.entries[(i, j)].abs());
                }
            }
        }
        best
    }
}

/// Minimum admissible gap between nodes, relative to their magnitude.
pub const DISTINCTNESS_GAP: f64 = 1e-9;

fn check_distinct(x: &[f64]) -> Result<()> {
    let floor = DISTINCTNESS_GAP * (1.0 + crate::measure::max_abs(x));
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    for w in order.windows(2) {
        let gap = x[w[1]] - x[w[0]];
        if gap < floor {
            let (i, j) = (w[0].min(w[1]), w[0].max(w[1]));
            return Err(LabError::DegenerateNodes { i, j, gap });
        }
    }
    Ok(())
}

/// Divided-difference matrix from precomputed values `φ(x_i)`. This is how
/// smooth maps enter: only their values at the nodes matter.
pub fn divided_difference_from_values(
    x: &[f64],
    values: &[f64],
    monotonicity: Monotonicity,
) -> Result<DividedDifferenceMatrix> {
    ensure_len(x.len(), values.len())?;
    crate::measure::ensure_finite(x)?;
    check_distinct(x)?;
    let n = x.len();
    let mut m = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            (values[i] - values[j]) / (x[i] - x[j])
        }
    });
    zero_row_sums(&mut m);
    Ok(DividedDifferenceMatrix { entries: m, monotonicity })
}

pub fn divided_difference_matrix(
    x: &[f64],
    phi: &PiecewiseLinearFn,
) -> Result<DividedDifferenceMatrix> {
    divided_difference_from_values(x, &phi.apply(x), phi.monotonicity())
}

/// `−(1/n)·Θ[x;φ](x − x̄·1)` against `φ(x) − mean(φ(x))·1`.
pub fn centering_identity_check(x: &[f64], phi: &PiecewiseLinearFn) -> Result<VerificationReport> {
    let dd = divided_difference_matrix(x, phi)?;
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let centered: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let lhs: Vec<f64> = mat_vec(&dd.entries, &centered).iter().map(|v| -v / n).collect();
    let values = phi.apply(x);
    let vmean = values.iter().sum::<f64>() / n;
    let rhs: Vec<f64> = values.iter().map(|v| v - vmean).collect();
    let deviation = max_abs_diff(&lhs, &rhs);
    Ok(VerificationReport::identity(
        "centering_identity",
        deviation,
        IDENTITY_TOLERANCE,
        Instance::new(x).phi(phi).matrix(row_major(&dd.entries)),
    ))
}
