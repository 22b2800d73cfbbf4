use nalgebra::{DMatrix, SymmetricEigen};

use super::{mat_vec, row_major};
use crate::error::{ensure_len, LabError, Result};
use crate::knorms::SymmetricNorm;
use crate::report::{Instance, VerificationReport};

/// Relative tolerance for symmetry, row sums and off-diagonal signs.
pub const STRUCTURE_TOLERANCE: f64 = 1e-12;
/// Relative tolerance on the smallest eigenvalue of `−L`.
pub const PSD_TOLERANCE: f64 = 1e-9;

/// Symmetric matrix with zero row sums, non-negative off-diagonal entries
/// and `−L` positive semi-definite. Tolerances scale with `max |L_ij|`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix {
    entries: DMatrix<f64>,
}

fn scale_of(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(1.0_f64, |a, v| a.max(v.abs()))
}

impl LaplacianMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let n = entries.nrows();
        if n == 0 || entries.ncols() != n {
            return Err(LabError::NotLaplacian(format!(
                "shape {}x{} is not square",
                n,
                entries.ncols()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(LabError::NotLaplacian("non-finite entry".into()));
        }
        let tol = STRUCTURE_TOLERANCE * scale_of(&entries);
        for i in 0..n {
            let row: f64 = entries.row(i).iter().sum();
            if row.abs() > tol {
                return Err(LabError::NotLaplacian(format!("row {i} sums to {row:e}")));
            }
            for j in 0..n {
                if (entries[(i, j)] - entries[(j, i)]).abs() > tol {
                    return Err(LabError::NotLaplacian(format!("asymmetric at ({i},{j})")));
                }
                if i != j && entries[(i, j)] < -tol {
                    return Err(LabError::NotLaplacian(format!(
                        "negative off-diagonal L[{i},{j}] = {:e}",
                        entries[(i, j)]
                    )));
                }
            }
        }
        let lap = Self { entries };
        let min_eig = lap.min_eigenvalue_of_negation();
        if min_eig < -PSD_TOLERANCE * scale_of(&lap.entries) {
            return Err(LabError::NotLaplacian(format!(
                "-L has eigenvalue {min_eig:e}"
            )));
        }
        if n <= 3 && !lap.negation_minors_nonnegative() {
            return Err(LabError::NotLaplacian("-L has a negative principal minor".into()));
        }
        Ok(lap)
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        ensure_len(self.n(), x.len())?;
        Ok(mat_vec(&self.entries, x))
    }

    /// `max_{i≠j} L_ij` (zero for `n = 1`).
    pub fn max_off_diagonal(&self) -> f64 {
        self.row_off_diagonal_max().into_iter().fold(0.0, f64::max)
    }

    /// `x_∞(i) = max_{j≠i} L_ij`.
    pub fn row_off_diagonal_max(&self) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i)
                    .map(|j| self.entries[(i, j)])
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    pub fn min_eigenvalue_of_negation(&self) -> f64 {
        let neg = -&self.entries;
        SymmetricEigen::new(neg)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Every principal minor of `−L` is non-negative (`n ≤ 3` only). All
    /// principal minors are needed: `−L` is singular, so leading minors
    /// alone do not certify semi-definiteness.
    fn negation_minors_nonnegative(&self) -> bool {
        let n = self.n();
        let neg = -&self.entries;
        let tol = PSD_TOLERANCE * scale_of(&neg).powi(n as i32);
        (1u32..(1 << n)).all(|mask| {
            let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let sub = DMatrix::from_fn(idx.len(), idx.len(), |a, b| neg[(idx[a], idx[b])]);
            sub.determinant() >= -tol
        })
    }
}

/// `‖L̂‖_{1→1}` and `‖L̂‖_{∞→∞}` for `L̂ = L − x_∞ 1ᵀ`, returned as
/// (max column abs sum, max row abs sum).
pub fn lhat_row_col_bounds(l: &LaplacianMatrix) -> (f64, f64) {
    let n = l.n();
    let x_inf = l.row_off_diagonal_max();
    let hat = DMatrix::from_fn(n, n, |i, j| l.entries[(i, j)] - x_inf[i]);
    let col = (0..n)
        .map(|j| hat.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let row = (0..n)
        .map(|i| hat.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    (col, row)
}

/// `‖Lx‖ ≤ n·max_{i≠j} L_ij·‖x‖` for mean-zero `x`.
pub fn laplacian_conditional_bound(
    l: &LaplacianMatrix,
    x: &[f64],
    norm: &dyn SymmetricNorm,
    tol: f64,
) -> Result<VerificationReport> {
    ensure_len(l.n(), x.len())?;
    let sum: f64 = x.iter().sum();
    let scale = x.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
    if sum.abs() > 1e-10 * scale {
        return Err(LabError::NotMeanZero(sum));
    }
    let lx = l.apply(x)?;
    let lhs = norm.eval(&lx);
    let coeff = l.n() as f64 * l.max_off_diagonal();
    let rhs = coeff * norm.eval(x);
    Ok(VerificationReport::inequality(
        "laplacian_conditional_bound",
        lhs,
        rhs,
        tol,
        Instance::new(x)
            .matrix(row_major(&l.entries))
            .norm(norm.name()),
    )
    .with_detail("n_max_offdiag", coeff))
}
