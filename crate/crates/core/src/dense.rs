//! Dense complex kernels shared by the element and matrix layers.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const EIGEN_MAX_ITER: usize = 10_000;

/// `(m + m*) / 2`. The result is exactly Hermitian in floating point.
pub fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Operator 2-norm (largest singular value).
pub fn spectral_norm(m: &CMatrix) -> f64 {
    match m.nrows() {
        0 => 0.0,
        1 => m[(0, 0)].norm(),
        _ => m
            .clone()
            .try_svd(false, false, f64::EPSILON, EIGEN_MAX_ITER)
            .map(|svd| svd.singular_values.max())
            // SVD failure is vanishingly rare; Frobenius still bounds the 2-norm from above.
            .unwrap_or_else(|| m.norm()),
    }
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
///
/// Only the Hermitian part of `m` is read; callers symmetrize first when
/// the input carries a defect.
pub fn hermitian_eigen(m: &CMatrix, block: usize) -> Result<(DVector<f64>, CMatrix)> {
    let n = m.nrows();
    if n == 1 {
        return Ok((
            DVector::from_element(1, m[(0, 0)].re),
            CMatrix::identity(1, 1),
        ));
    }
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or(Error::NoConvergence { block })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

pub fn min_hermitian_eigenvalue(m: &CMatrix, block: usize) -> Result<f64> {
    if m.nrows() == 1 {
        return Ok(m[(0, 0)].re);
    }
    let (values, _) = hermitian_eigen(m, block)?;
    Ok(values[0])
}

/// Applies `f` to the spectrum of the Hermitian matrix `m`: `U f(Λ) U*`,
/// symmetrized so the output is exactly Hermitian.
pub fn hermitian_map(m: &CMatrix, block: usize, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    if m.nrows() == 1 {
        return Ok(CMatrix::from_element(
            1,
            1,
            Complex64::new(f(m[(0, 0)].re), 0.0),
        ));
    }
    let (values, vectors) = hermitian_eigen(m, block)?;
    let mut scaled = vectors.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= Complex64::new(f(values[j]), 0.0);
    }
    Ok(symmetrize(&(scaled * vectors.adjoint())))
}

/// Maximum absolute row sum; cheap upper bound used to pick scaling steps.
pub fn one_norm(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring around a Taylor kernel.
///
/// The argument is scaled by `2^-s` so its 1-norm is at most 1/2, the Taylor
/// series is summed until the next term is below unit roundoff relative to the
/// partial sum, and the result is squared `s` times.
pub fn expm_taylor(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    if n == 1 {
        return CMatrix::from_element(1, 1, m[(0, 0)].exp());
    }
    let norm = one_norm(m);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = m * Complex64::new(0.5f64.powi(squarings), 0.0);

    let mut sum = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for k in 1..=40 {
        term = (&term * &scaled) / Complex64::new(k as f64, 0.0);
        sum += &term;
        if one_norm(&term) <= f64::EPSILON * 0.25 * one_norm(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

pub fn is_square(m: &CMatrix, k: usize) -> bool {
    m.nrows() == k && m.ncols() == k
}
