//! Symmetric eigenvalues and a Cholesky factorization that tolerates the
//! rounding-level negative eigenvalues of Toeplitz correlation matrices.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};

/// Eigenvalues below `-PSD_TOLERANCE` mean the matrix is genuinely indefinite.
pub const PSD_TOLERANCE: f64 = 1e-8;

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(matrix: &DMatrix<f64>) -> Vec<f64> {
    let mut values: Vec<f64> = SymmetricEigen::new(matrix.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Lower-triangular `L` with `L L^T = A` for a symmetric near-PSD `A`.
///
/// Plain Cholesky first; if that fails, negative eigenvalues are clipped to
/// zero and the repaired matrix is factored with zero pivots allowed.
pub fn cholesky_psd(matrix: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = matrix.nrows();
    if n != matrix.ncols() {
        return Err(Error::Contract(format!(
            "cholesky_psd needs a square matrix, got {}x{}",
            n,
            matrix.ncols()
        )));
    }
    if let Some(chol) = matrix.clone().cholesky() {
        return Ok(chol.l());
    }
    let eig = SymmetricEigen::new(matrix.clone());
    let min_eigenvalue = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min_eigenvalue < -PSD_TOLERANCE {
        return Err(Error::NotPsd { min_eigenvalue });
    }
    let clipped = eig.eigenvalues.map(|v| v.max(0.0));
    let repaired =
        &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose();
    Ok(semidefinite_cholesky(&repaired))
}

fn semidefinite_cholesky(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let scale = (0..n)
        .map(|i| a[(i, i)].abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut pivot = a[(j, j)];
        for k in 0..j {
            pivot -= l[(j, k)] * l[(j, k)];
        }
        if pivot <= 1e-14 * scale {
            // rank-deficient direction: the column below is zero in exact arithmetic
            continue;
        }
        let diag = pivot.sqrt();
        l[(j, j)] = diag;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / diag;
        }
    }
    l
}
