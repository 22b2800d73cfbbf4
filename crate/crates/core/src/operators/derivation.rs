//! The difference operator `(∂f)_ij = (f_i − f_j)/√2` from `ℓ²_n(λ)` to
//! `ℓ²_{n×n}(λ⊗λ)`, λ uniform, and the identities linking it to `Θ`.

use nalgebra::DMatrix;

use super::{mat_vec, theta_matrix};
use crate::error::{ensure_len, Result};
use crate::report::{max_abs_diff, Instance, VerificationReport, IDENTITY_TOLERANCE};

/// Matrix of `∂` (rows indexed by pairs `i·n + j`) and of its adjoint.
#[derive(Debug, Clone)]
pub struct Derivation {
    n: usize,
    forward: DMatrix<f64>,
    adjoint: DMatrix<f64>,
}

impl Derivation {
    pub fn new(n: usize) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut forward = DMatrix::zeros(n * n, n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    forward[(i * n + j, i)] += s;
                    forward[(i * n + j, j)] -= s;
                }
            }
        }
        // Adjoint for weighted inner products: G_in⁻¹ Dᵀ G_out with
        // G_in = λ-weights and G_out = (λ⊗λ)-weights.
        let w_in = 1.0 / n as f64;
        let w_out = w_in * w_in;
        let adjoint = forward.transpose() * (w_out / w_in);
        Self { n, forward, adjoint }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        mat_vec(&self.forward, f)
    }

    pub fn apply_adjoint(&self, pairs: &[f64]) -> Vec<f64> {
        mat_vec(&self.adjoint, pairs)
    }

    /// `∂*∂` as a matrix.
    pub fn gram(&self) -> DMatrix<f64> {
        &self.adjoint * &self.forward
    }
}

/// `L = n⁻¹ 1 1ᵀ − I`, so `−Lf = f − E_λ f`.
pub fn uniform_laplacian(n: usize) -> DMatrix<f64> {
    let inv = 1.0 / n as f64;
    DMatrix::from_fn(n, n, |i, j| if i == j { inv - 1.0 } else { inv })
}

/// Checks entrywise:
/// `−L = ∂*∂`, `∂*(f∂g) = −Θ_f g`, `∂*((∂f)g) = −Θ_g f`, and
/// `∂*(f∂g) = −½(L(fg) − g·Lf + f·Lg)`.
pub fn derivation_checks(f: &[f64], g: &[f64]) -> Result<VerificationReport> {
    ensure_len(f.len(), g.len())?;
    let n = f.len();
    let d = Derivation::new(n);
    let lap = uniform_laplacian(n);

    let gram_dev = (d.gram() + &lap).iter().fold(0.0_f64, |m, v| m.max(v.abs()));

    let dg = d.apply(g);
    let df = d.apply(f);
    // Left action multiplies pair (i,j) by f_i, right action by g_j.
    let f_dg: Vec<f64> = (0..n * n).map(|ij| f[ij / n] * dg[ij]).collect();
    let df_g: Vec<f64> = (0..n * n).map(|ij| df[ij] * g[ij % n]).collect();
    let left = d.apply_adjoint(&f_dg);
    let right = d.apply_adjoint(&df_g);

    let neg_theta_f_g: Vec<f64> = theta_matrix(f).apply(g)?.iter().map(|v| -v).collect();
    let neg_theta_g_f: Vec<f64> = theta_matrix(g).apply(f)?.iter().map(|v| -v).collect();

    let fg: Vec<f64> = f.iter().zip(g).map(|(a, b)| a * b).collect();
    let l_fg = mat_vec(&lap, &fg);
    let l_f = mat_vec(&lap, f);
    let l_g = mat_vec(&lap, g);
    let laplacian_form: Vec<f64> = (0..n)
        .map(|i| -0.5 * (l_fg[i] - g[i] * l_f[i] + f[i] * l_g[i]))
        .collect();

    let left_dev = max_abs_diff(&left, &neg_theta_f_g);
    let right_dev = max_abs_diff(&right, &neg_theta_g_f);
    let form_dev = max_abs_diff(&left, &laplacian_form);
    let worst = gram_dev.max(left_dev).max(right_dev).max(form_dev);

    Ok(VerificationReport::identity(
        "derivation_identities",
        worst,
        IDENTITY_TOLERANCE,
        Instance::new(f).g(g),
    )
    .with_detail("gram", gram_dev)
    .with_detail("left_action", left_dev)
    .with_detail("right_action", right_dev)
    .with_detail("laplacian_form", form_dev))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_vanish() {
        let r = derivation_checks(&[1.0; 4], &[1.0; 4]).unwrap();
        assert!(r.pass && r.lhs < 1e-15);
        let d = Derivation::new(4);
        assert!(d.apply(&[1.0; 4]).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn unit_f_reduces_to_centering() {
        let g = [0.4, -1.0, 2.0];
        let d = Derivation::new(3);
        let back = d.apply_adjoint(&d.apply(&g));
        let mean = g.iter().sum::<f64>() / 3.0;
        for (b, v) in back.iter().zip(&g) {
            assert!((b - (v - mean)).abs() < 1e-14);
        }
        let r = derivation_checks(&[1.0; 3], &g).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn adjoint_matches_closed_form() {
        // (∂*A)_i = (1/(n√2)) Σ_j (A_ij − A_ji).
        let n = 3;
        let a: Vec<f64> = (0..9).map(|k| (k as f64 * 0.37).sin()).collect();
        let d = Derivation::new(n);
        let got = d.apply_adjoint(&a);
        for i in 0..n {
            let expected: f64 = (0..n).map(|j| a[i * n + j] - a[j * n + i]).sum::<f64>()
                / (n as f64 * 2f64.sqrt());
            assert!((got[i] - expected).abs() < 1e-15);
        }
    }
}
