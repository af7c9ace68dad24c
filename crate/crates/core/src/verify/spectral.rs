use nalgebra::{DVector, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::amatrix::AMatrix;
use crate::dense::{self, CMatrix};
use crate::error::{Error, Result};
use crate::module_an::AVector;

/// Relative tolerance for normality of the input and for the reconstruction.
pub const SPECTRAL_TOL: f64 = 1e-9;
/// Allowed `‖UU* − I‖`.
pub const UNITARY_TOL: f64 = 1e-10;

/// `M = U diag(λ) U*` over a commutative shape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralDecomposition {
    pub unitary: AMatrix,
    /// Eigenvalue elements `λ_1, …, λ_n`, at each point sorted descending by
    /// real part, then imaginary part.
    pub diagonal: AVector,
    /// `‖U diag(λ) U* − M‖`.
    pub residual: f64,
}

fn point_eigen(m: &CMatrix, block: usize) -> Result<(Vec<Complex64>, CMatrix)> {
    if *m == m.adjoint() {
        let (values, vectors) = dense::hermitian_eigen(m, block)?;
        return Ok((
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            vectors,
        ));
    }
    let schur =
        Schur::try_new(m.clone(), f64::EPSILON, 10_000).ok_or(Error::NoConvergence { block })?;
    let (q, t) = schur.unpack();
    Ok(((0..t.nrows()).map(|j| t[(j, j)]).collect(), q))
}

/// Diagonalizes a normal matrix over a commutative shape one spectrum point at
/// a time.
pub fn pointwise_spectral_diag(m: &AMatrix) -> Result<SpectralDecomposition> {
    let shape = m.shape();
    if !shape.is_commutative() {
        return Err(Error::Invalid(format!(
            "spectral diagonalization is only implemented for commutative shapes, got {shape}"
        )));
    }
    let scale = m.norm().max(1.0);
    let flat = m.flatten();
    let defect = flat
        .iter()
        .map(|f| dense::spectral_norm(&(f * f.adjoint() - f.adjoint() * f)))
        .fold(0.0, f64::max);
    if defect > SPECTRAL_TOL * scale * scale {
        return Err(Error::Hypothesis(format!(
            "M is not normal (‖MM* − M*M‖ = {defect:e})"
        )));
    }

    let n = m.n();
    let mut unitaries = Vec::with_capacity(flat.len());
    let mut diagonals = Vec::with_capacity(flat.len());
    for (b, f) in flat.iter().enumerate() {
        let (values, vectors) = point_eigen(f, b)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            values[j]
                .re
                .total_cmp(&values[i].re)
                .then(values[j].im.total_cmp(&values[i].im))
        });
        let sorted: Vec<Complex64> = order.iter().map(|&i| values[i]).collect();
        let u = CMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
        diagonals.push(CMatrix::from_diagonal(&DVector::from_vec(sorted)));
        unitaries.push(u);
    }

    let unitary_defect = unitaries
        .iter()
        .map(|u| dense::spectral_norm(&(u * u.adjoint() - CMatrix::identity(n, n))))
        .fold(0.0, f64::max);
    let residual = unitaries
        .iter()
        .zip(&diagonals)
        .zip(&flat)
        .map(|((u, d), f)| dense::spectral_norm(&(u * d * u.adjoint() - f)))
        .fold(0.0, f64::max);
    if unitary_defect > UNITARY_TOL || residual > SPECTRAL_TOL * scale {
        return Err(Error::NoConvergence { block: 0 });
    }

    let unitary = AMatrix::unflatten(unitaries, shape, n)?;
    let diag = AMatrix::unflatten(diagonals, shape, n)?;
    Ok(SpectralDecomposition {
        unitary,
        diagonal: diag.diag_vector(),
        residual,
    })
}

impl SpectralDecomposition {
    /// `U diag(λ) U*`.
    pub fn reconstruct(&self) -> AMatrix {
        let d = AMatrix::diag_matrix(&self.diagonal);
        &(&self.unitary * &d) * &self.unitary.adjoint()
    }
}
