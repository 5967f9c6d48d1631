//! Dense eigensolvers — the oracle layer.
//!
//! Everything here is dense and guarded by an explicit dimension cap; large
//! problems go through the Lanczos estimators in the spectral module instead.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numkit::matrix::RealSymMatrix;

/// Default dimension cap for dense eigensolves.
pub const DEFAULT_DENSE_CAP: usize = 2000;

/// Eigendecomposition of a real symmetric matrix, eigenvalues ascending,
/// eigenvector columns orthonormal and ordered to match.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

/// Full eigendecomposition of a symmetric matrix at the default cap.
pub fn dense_sym_eigen(m: &RealSymMatrix) -> Result<SymEigen> {
    dense_sym_eigen_capped(m, DEFAULT_DENSE_CAP)
}

pub fn dense_sym_eigen_capped(m: &RealSymMatrix, cap: usize) -> Result<SymEigen> {
    if m.n() > cap {
        return Err(Error::DimensionTooLarge { n: m.n(), cap });
    }
    Ok(sym_eigen_of_dense(&m.to_dense_matrix()))
}

/// Eigendecomposition of an already-dense symmetric matrix (no cap check).
pub(crate) fn sym_eigen_of_dense(dense: &DMatrix<f64>) -> SymEigen {
    let n = dense.nrows();
    let eig = dense.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    SymEigen { values, vectors }
}

/// Eigenvalues of a dense complex square matrix via its Schur form.
pub fn dense_complex_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    dense_complex_eigenvalues_capped(m, DEFAULT_DENSE_CAP)
}

pub fn dense_complex_eigenvalues_capped(
    m: &DMatrix<Complex64>,
    cap: usize,
) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "eigenvalues of a non-square matrix");
    if n > cap {
        return Err(Error::DimensionTooLarge { n, cap });
    }
    let schur = m.clone().try_schur(1e-14, 0).ok_or(Error::NoConvergence)?;
    let ev = schur.eigenvalues().ok_or(Error::NoConvergence)?;
    Ok(ev.iter().copied().collect())
}

/// Spectral radius: max |eigenvalue| of a dense complex matrix.
pub fn spectral_radius(m: &DMatrix<Complex64>) -> Result<f64> {
    Ok(dense_complex_eigenvalues(m)?
        .iter()
        .fold(0.0f64, |a, z| a.max(z.norm())))
}

/// f(M) for symmetric positive definite M via the eigendecomposition,
/// with f applied to the eigenvalues. Fails with `NotPositiveDefinite`
/// when an eigenvalue is not strictly positive (relative to the largest).
pub fn spd_power(m: &RealSymMatrix, p: f64, what: &str) -> Result<DMatrix<f64>> {
    let eig = dense_sym_eigen(m)?;
    let lmax = eig.values.last().copied().unwrap_or(0.0);
    if eig.values[0] <= 1e-14 * lmax.abs().max(1e-300) || eig.values[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite(what.to_string()));
    }
    let d = DVector::from_iterator(eig.values.len(), eig.values.iter().map(|&v| v.powf(p)));
    Ok(&eig.vectors * DMatrix::from_diagonal(&d) * eig.vectors.transpose())
}
