//! Matrices over a finite-dimensional C*-algebra.
//!
//! `M_n(⊕_b M_{k_b})` is identified with `⊕_b M_{n·k_b}` by [`AMatrix::flatten`]:
//! block `b` of the flattened form is the `(n·k_b)×(n·k_b)` complex matrix whose
//! `(j, k)` sub-block is the `b`-th block of entry `m_{j,k}`. Positivity, norms
//! and square roots are computed on that representation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraShape, Element};
use crate::dense::{self, CMatrix};
use crate::error::{Error, Result};
use crate::module_an::AVector;

/// An `n×n` matrix of elements sharing one algebra shape. Entries are row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct AMatrix {
    shape: AlgebraShape,
    n: usize,
    entries: Vec<Element>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    algebra: AlgebraShape,
    n: usize,
    entries: Vec<Vec<Element>>,
}

impl TryFrom<MatrixRepr> for AMatrix {
    type Error = Error;

    fn try_from(repr: MatrixRepr) -> Result<Self> {
        if repr.entries.len() != repr.n {
            return Err(Error::structural(format!(
                "expected {} rows, got {}",
                repr.n,
                repr.entries.len()
            )));
        }
        AMatrix::from_rows(&repr.algebra, repr.entries)
    }
}

impl From<AMatrix> for MatrixRepr {
    fn from(m: AMatrix) -> Self {
        let n = m.n;
        let mut rows = Vec::with_capacity(n);
        let mut it = m.entries.into_iter();
        for _ in 0..n {
            rows.push(it.by_ref().take(n).collect());
        }
        MatrixRepr {
            algebra: m.shape,
            n,
            entries: rows,
        }
    }
}

/// Positivity certificate for a matrix over the algebra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    pub is_positive: bool,
    /// Largest `‖F − F*‖` over flattened blocks.
    pub hermitian_defect: f64,
    /// Smallest eigenvalue of each symmetrized flattened block. Empty when the
    /// input was rejected as not self-adjoint.
    pub min_eigenvalue_per_block: Vec<f64>,
    pub tol_used: f64,
    /// Norm of the flattened input.
    pub scale: f64,
}

impl PsdReport {
    /// `tol · max(1, scale)`.
    pub fn threshold(&self) -> f64 {
        self.tol_used * self.scale.max(1.0)
    }

    pub fn is_selfadjoint(&self) -> bool {
        self.hermitian_defect <= self.threshold()
    }

    /// Smallest eigenvalue over all blocks, `-inf` if eigenvalues were not computed.
    pub fn min_eigenvalue(&self) -> f64 {
        if self.min_eigenvalue_per_block.is_empty() {
            return f64::NEG_INFINITY;
        }
        self.min_eigenvalue_per_block
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Scale-relative margin: `≥ −tol` exactly when the report is positive.
    pub fn margin(&self) -> f64 {
        let denom = self.scale.max(1.0);
        let mut margin = self
            .min_eigenvalue_per_block
            .iter()
            .fold(f64::INFINITY, |acc, &v| acc.min(v / denom));
        if !self.is_selfadjoint() {
            margin = margin.min(-self.hermitian_defect / denom);
        }
        margin
    }
}

/// Bracketing of repeated Schur products, which need not associate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nesting {
    /// `((M∘M)∘M)∘…`
    #[default]
    Left,
    /// `M∘(M∘(M∘…))`
    Right,
}

impl AMatrix {
    pub fn from_fn(
        shape: &AlgebraShape,
        n: usize,
        mut f: impl FnMut(usize, usize) -> Element,
    ) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for j in 0..n {
            for k in 0..n {
                entries.push(f(j, k));
            }
        }
        AMatrix {
            shape: shape.clone(),
            n,
            entries,
        }
    }

    /// Builds from rows, validating squareness and a common shape.
    pub fn from_rows(shape: &AlgebraShape, rows: Vec<Vec<Element>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Invalid("matrix size must be positive".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (j, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::structural(format!(
                    "row {j} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for e in row {
                shape.ensure_same(e.shape())?;
                entries.push(e);
            }
        }
        Ok(AMatrix {
            shape: shape.clone(),
            n,
            entries,
        })
    }

    /// A matrix over `C` from real rows.
    pub fn scalar_real(rows: &[&[f64]]) -> Result<Self> {
        let shape = AlgebraShape::scalar();
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| Element::from_real_coords(&[x])).collect())
            .collect();
        AMatrix::from_rows(&shape, rows)
    }

    /// A matrix over `C` from complex rows.
    pub fn scalar_complex(rows: &[Vec<num_complex::Complex64>]) -> Result<Self> {
        let shape = AlgebraShape::scalar();
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&z| Element::from_coords(&[z])).collect())
            .collect();
        AMatrix::from_rows(&shape, rows)
    }

    pub fn zeros(shape: &AlgebraShape, n: usize) -> Self {
        AMatrix::from_fn(shape, n, |_, _| Element::zero(shape))
    }

    pub fn identity(shape: &AlgebraShape, n: usize) -> Self {
        AMatrix::from_fn(shape, n, |j, k| {
            if j == k {
                Element::identity(shape)
            } else {
                Element::zero(shape)
            }
        })
    }

    /// `E_n`: the identity of the algebra in every entry.
    pub fn ones(shape: &AlgebraShape, n: usize) -> Self {
        AMatrix::from_fn(shape, n, |_, _| Element::identity(shape))
    }

    /// `diag(x)`.
    pub fn diag_matrix(x: &AVector) -> Self {
        let shape = x.shape();
        AMatrix::from_fn(shape, x.len(), |j, k| {
            if j == k {
                x.get(j).clone()
            } else {
                Element::zero(shape)
            }
        })
    }

    /// `yy*`, with entries `y_j y_k*`.
    pub fn outer_product(y: &AVector) -> Self {
        let adj: Vec<Element> = y.entries().iter().map(Element::adjoint).collect();
        AMatrix::from_fn(y.shape(), y.len(), |j, k| y.get(j) * &adj[k])
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, j: usize, k: usize) -> &Element {
        &self.entries[j * self.n + k]
    }

    pub fn entries(&self) -> &[Element] {
        &self.entries
    }

    /// Diagonal entries in increasing index order.
    pub fn diag_vector(&self) -> AVector {
        AVector::new((0..self.n).map(|j| self.get(j, j).clone()).collect()).expect("n >= 1")
    }

    pub fn row_sums(&self) -> AVector {
        let sums = (0..self.n)
            .map(|j| (0..self.n).fold(Element::zero(&self.shape), |acc, k| &acc + self.get(j, k)))
            .collect();
        AVector::new(sums).expect("n >= 1")
    }

    fn ensure_conformable(&self, other: &AMatrix) -> Result<()> {
        self.shape.ensure_same(&other.shape)?;
        if self.n != other.n {
            return Err(Error::structural(format!(
                "matrix sizes differ: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &AMatrix,
        f: impl Fn(&Element, &Element) -> Element,
    ) -> Result<AMatrix> {
        self.ensure_conformable(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(AMatrix {
            shape: self.shape.clone(),
            n: self.n,
            entries,
        })
    }

    fn map(&self, f: impl Fn(&Element) -> Element) -> AMatrix {
        AMatrix {
            shape: self.shape.clone(),
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn checked_add(&self, other: &AMatrix) -> Result<AMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &AMatrix) -> Result<AMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Matrix product, evaluated through the flattened representation.
    pub fn checked_mul(&self, other: &AMatrix) -> Result<AMatrix> {
        self.ensure_conformable(other)?;
        let blocks = self
            .flatten()
            .iter()
            .zip(other.flatten())
            .map(|(a, b)| a * b)
            .collect();
        AMatrix::unflatten(blocks, &self.shape, self.n)
    }

    /// `[m_{k,j}*]`.
    pub fn adjoint(&self) -> AMatrix {
        AMatrix::from_fn(&self.shape, self.n, |j, k| self.get(k, j).adjoint())
    }

    /// `[m_{k,j}]`, entries are not conjugated.
    pub fn transpose(&self) -> AMatrix {
        AMatrix::from_fn(&self.shape, self.n, |j, k| self.get(k, j).clone())
    }

    pub fn trace(&self) -> Element {
        (0..self.n).fold(Element::zero(&self.shape), |acc, j| &acc + self.get(j, j))
    }

    pub fn scale_real(&self, x: f64) -> AMatrix {
        self.map(|e| e.scale_real(x))
    }

    /// `[a · m_{j,k}]`.
    pub fn left_scale(&self, a: &Element) -> Result<AMatrix> {
        self.shape.ensure_same(a.shape())?;
        Ok(self.map(|e| a * e))
    }

    /// `Mx`, with `(Mx)_j = Σ_k m_{j,k} x_k`.
    pub fn apply(&self, x: &AVector) -> Result<AVector> {
        self.shape.ensure_same(x.shape())?;
        if x.len() != self.n {
            return Err(Error::structural(format!(
                "vector length {} does not match matrix size {}",
                x.len(),
                self.n
            )));
        }
        let out = (0..self.n)
            .map(|j| {
                (0..self.n).fold(Element::zero(&self.shape), |acc, k| {
                    &acc + &(self.get(j, k) * x.get(k))
                })
            })
            .collect();
        AVector::new(out)
    }

    /// C*-algebraic Schur product: entries `(a_{j,k} b_{j,k} + b_{j,k} a_{j,k}) / 2`.
    pub fn schur_product(&self, other: &AMatrix) -> Result<AMatrix> {
        self.ensure_conformable(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (&(a * b) + &(b * a)).scale_real(0.5))
            .collect();
        Ok(AMatrix {
            shape: self.shape.clone(),
            n: self.n,
            entries,
        })
    }

    /// `(M°)^p`, with `(M°)^0 = I`.
    pub fn schur_power(&self, p: u32, nesting: Nesting) -> AMatrix {
        match p {
            0 => AMatrix::identity(&self.shape, self.n),
            _ => {
                let mut acc = self.clone();
                for _ in 1..p {
                    acc = match nesting {
                        Nesting::Left => acc.schur_product(self),
                        Nesting::Right => self.schur_product(&acc),
                    }
                    .expect("same shape");
                }
                acc
            }
        }
    }

    /// Faithful representation as one complex matrix per algebra block.
    pub fn flatten(&self) -> Vec<CMatrix> {
        let n = self.n;
        self.shape
            .blocks()
            .iter()
            .enumerate()
            .map(|(b, &k)| {
                let mut big = CMatrix::zeros(n * k, n * k);
                for j in 0..n {
                    for l in 0..n {
                        big.view_mut((j * k, l * k), (k, k))
                            .copy_from(self.get(j, l).block(b));
                    }
                }
                big
            })
            .collect()
    }

    pub fn unflatten(blocks: Vec<CMatrix>, shape: &AlgebraShape, n: usize) -> Result<AMatrix> {
        if n == 0 {
            return Err(Error::Invalid("matrix size must be positive".into()));
        }
        if blocks.len() != shape.num_blocks() {
            return Err(Error::structural(format!(
                "expected {} flattened blocks, got {}",
                shape.num_blocks(),
                blocks.len()
            )));
        }
        for (b, (m, &k)) in blocks.iter().zip(shape.blocks()).enumerate() {
            if !dense::is_square(m, n * k) {
                return Err(Error::structural(format!(
                    "flattened block {b} is {}x{}, expected {}x{}",
                    m.nrows(),
                    m.ncols(),
                    n * k,
                    n * k
                )));
            }
        }
        Ok(AMatrix::from_fn(shape, n, |j, l| {
            Element::from_fn(shape, |b, k| {
                blocks[b].view((j * k, l * k), (k, k)).into_owned()
            })
        }))
    }

    /// C*-norm of `M_n(A)`.
    pub fn norm(&self) -> f64 {
        self.flatten()
            .iter()
            .map(dense::spectral_norm)
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation between two conformable matrices.
    pub fn max_abs_diff(&self, other: &AMatrix) -> Result<f64> {
        self.ensure_conformable(other)?;
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.max_abs_diff(b))
            .try_fold(0.0, |acc, d| Ok(f64::max(acc, d?)))
    }

    pub fn is_selfadjoint_exact(&self) -> bool {
        *self == self.adjoint()
    }

    /// Positivity certificate on the flattened blocks with relative tolerance.
    pub fn psd_check(&self, tol: f64) -> Result<PsdReport> {
        if !(tol > 0.0) {
            return Err(Error::Invalid(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        let flat = self.flatten();
        let scale = flat.iter().map(dense::spectral_norm).fold(0.0, f64::max);
        let hermitian_defect = flat
            .iter()
            .map(|f| dense::spectral_norm(&(f - f.adjoint())))
            .fold(0.0, f64::max);
        let threshold = tol * scale.max(1.0);
        let mut min_eigenvalue_per_block = Vec::new();
        if hermitian_defect <= threshold {
            for (b, f) in flat.iter().enumerate() {
                min_eigenvalue_per_block
                    .push(dense::min_hermitian_eigenvalue(&dense::symmetrize(f), b)?);
            }
        }
        let is_positive = !min_eigenvalue_per_block.is_empty()
            && min_eigenvalue_per_block.iter().all(|&v| v >= -threshold);
        Ok(PsdReport {
            is_positive,
            hermitian_defect,
            min_eigenvalue_per_block,
            tol_used: tol,
            scale,
        })
    }

    /// `psd_check(M − N)`. The full order `M ⪰ N` also needs `M` and `N` positive,
    /// which callers check separately.
    pub fn loewner_geq(&self, other: &AMatrix, tol: f64) -> Result<PsdReport> {
        self.checked_sub(other)?.psd_check(tol)
    }

    /// Positive square root `R = R*` with `R·R = M`.
    pub fn positive_sqrt(&self, tol: f64) -> Result<AMatrix> {
        let report = self.psd_check(tol)?;
        if !report.is_positive {
            return Err(Error::NotPositiveMatrix {
                report: Box::new(report),
            });
        }
        let roots = self
            .flatten()
            .iter()
            .enumerate()
            .map(|(b, f)| dense::hermitian_map(&dense::symmetrize(f), b, |x| x.max(0.0).sqrt()))
            .collect::<Result<Vec<_>>>()?;
        AMatrix::unflatten(roots, &self.shape, self.n)
    }
}

impl std::ops::Add for &AMatrix {
    type Output = AMatrix;

    fn add(self, rhs: &AMatrix) -> AMatrix {
        self.checked_add(rhs).expect("conformable matrices")
    }
}

impl std::ops::Sub for &AMatrix {
    type Output = AMatrix;

    fn sub(self, rhs: &AMatrix) -> AMatrix {
        self.checked_sub(rhs).expect("conformable matrices")
    }
}

impl std::ops::Mul for &AMatrix {
    type Output = AMatrix;

    fn mul(self, rhs: &AMatrix) -> AMatrix {
        self.checked_mul(rhs).expect("conformable matrices")
    }
}

/// Runs [`AMatrix::psd_check`] over many matrices in parallel. Output order
/// follows input order.
pub fn psd_check_batch(matrices: &[AMatrix], tol: f64) -> Vec<Result<PsdReport>> {
    matrices.par_iter().map(|m| m.psd_check(tol)).collect()
}

/// Evaluates `x*(M∘N)x` in two ways over a commutative algebra: directly as
/// `⟨(M∘N)x, x⟩`, and as `Tr((diag x*) M (diag x) Nᵀ)`.
pub fn schur_quadratic_form_oracle(
    m: &AMatrix,
    n: &AMatrix,
    x: &AVector,
) -> Result<(Element, Element)> {
    if !m.shape().is_commutative() {
        return Err(Error::NonCommutative(m.shape().clone()));
    }
    let direct = m.schur_product(n)?.apply(x)?.inner_product(x)?;
    let x_adj = AVector::new(x.entries().iter().map(Element::adjoint).collect())?;
    let lhs = AMatrix::diag_matrix(&x_adj).checked_mul(m)?;
    let trace_form = lhs
        .checked_mul(&AMatrix::diag_matrix(x))?
        .checked_mul(&n.transpose())?
        .trace();
    Ok((direct, trace_form))
}
