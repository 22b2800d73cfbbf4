//! Matrix constructions behind the Leibniz and chain-rule inequalities.
//!
//! * [`theta_matrix`] builds `Θ_x`, the symmetric zero-sum matrix with
//!   off-diagonal `(x_i + x_j)/(2n)`. Under the uniform measure it encodes
//!   centered products: `fg − E(fg) = −Θ_f g − Θ_g f`.
//! * [`divided_difference_matrix`] builds `Θ[x;φ]`, a Laplacian whenever `φ`
//!   is monotone increasing.
//! * [`laplacian`] holds the Laplacian type and the conditional norm bound
//!   `‖Lx‖ ≤ n·max_{i≠j} L_ij·‖x‖` on mean-zero `x`.
//! * [`derivation`] holds the difference operator `∂` and its adjoint.

pub mod derivation;
pub mod laplacian;
mod piecewise;
mod theta;

pub use derivation::{derivation_checks, Derivation};
pub use laplacian::{laplacian_conditional_bound, lhat_row_col_bounds, LaplacianMatrix};
pub use piecewise::{Monotonicity, PiecewiseLinearFn};
pub use theta::{
    deflated_theta, divided_difference_from_values, divided_difference_matrix,
    centering_identity_check, theta_matrix, DividedDifferenceMatrix, ThetaMatrix,
};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Row-major JSON form of a square matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub entries: Vec<f64>,
}

impl MatrixJson {
    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        Self { n: m.nrows(), entries: row_major(m) }
    }

    pub fn to_matrix(&self) -> Option<DMatrix<f64>> {
        (self.entries.len() == self.n * self.n)
            .then(|| DMatrix::from_row_slice(self.n, self.n, &self.entries))
    }
}

pub fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Fills the diagonal so every row sums to zero.
pub(crate) fn zero_row_sums(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| m[(i, j)]).sum();
        m[(i, i)] = -off;
    }
}

pub(crate) fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    let x = nalgebra::DVector::from_column_slice(v);
    (m * x).iter().copied().collect()
}
