//! Finite-dimensional C*-algebras in Artin–Wedderburn form.
//!
//! An algebra is a direct sum `M_{k_1}(C) ⊕ ... ⊕ M_{k_B}(C)`, described by
//! [`AlgebraShape`]. An [`Element`] holds one dense complex matrix per block.
//! Arithmetic is blockwise, the involution is the blockwise conjugate
//! transpose, and the norm is the largest blockwise operator norm, which is
//! the C*-norm of the canonical faithful representation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::{self, CMatrix};
use crate::error::{Error, Result};

/// Block dimensions `k_1..k_B` of a direct sum of full matrix algebras.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ShapeRepr", into = "ShapeRepr")]
pub struct AlgebraShape {
    blocks: Arc<[usize]>,
}

#[derive(Serialize, Deserialize)]
struct ShapeRepr {
    blocks: Vec<usize>,
}

impl TryFrom<ShapeRepr> for AlgebraShape {
    type Error = Error;

    fn try_from(repr: ShapeRepr) -> Result<Self> {
        AlgebraShape::new(repr.blocks)
    }
}

impl From<AlgebraShape> for ShapeRepr {
    fn from(shape: AlgebraShape) -> Self {
        ShapeRepr {
            blocks: shape.blocks.to_vec(),
        }
    }
}

impl AlgebraShape {
    pub fn new(blocks: impl Into<Vec<usize>>) -> Result<Self> {
        let blocks = blocks.into();
        if blocks.is_empty() {
            return Err(Error::Invalid(
                "algebra shape needs at least one block".into(),
            ));
        }
        if blocks.contains(&0) {
            return Err(Error::Invalid("block dimensions must be positive".into()));
        }
        Ok(AlgebraShape {
            blocks: blocks.into(),
        })
    }

    /// The scalar algebra `C`.
    pub fn scalar() -> Self {
        AlgebraShape {
            blocks: Arc::from([1usize]),
        }
    }

    /// `C^m` with pointwise operations.
    pub fn commutative(points: usize) -> Result<Self> {
        AlgebraShape::new(vec![1; points])
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_commutative(&self) -> bool {
        self.blocks.iter().all(|&k| k == 1)
    }

    /// Complex dimension `Σ k_i²`.
    pub fn dimension(&self) -> usize {
        self.blocks.iter().map(|k| k * k).sum()
    }

    pub(crate) fn ensure_same(&self, other: &AlgebraShape) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::structural(format!(
                "algebra shapes differ: {self} vs {other}"
            )))
        }
    }
}

impl std::str::FromStr for AlgebraShape {
    type Err = Error;

    /// Parses `"k1,k2,..."`.
    fn from_str(s: &str) -> Result<Self> {
        let blocks = s
            .split(',')
            .map(|part| {
                part.trim().parse::<usize>().map_err(|_| {
                    Error::Invalid(format!("bad block dimension {part:?} in shape {s:?}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        AlgebraShape::new(blocks)
    }
}

impl fmt::Display for AlgebraShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(|k| k.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl fmt::Debug for AlgebraShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraShape{self}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Mul,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum UnaryOp {
    Neg,
    Adjoint,
    Scale(Complex64),
}

/// Spectral verdict on a single element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub is_selfadjoint: bool,
    pub is_positive: bool,
    /// Most negative eigenvalue of the Hermitian part, over all blocks.
    pub min_spectrum: f64,
    /// `‖a − a*‖`.
    pub hermitian_defect: f64,
}

/// One value of the algebra: a complex matrix per block.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ElementRepr", into = "ElementRepr")]
pub struct Element {
    shape: AlgebraShape,
    blocks: Vec<CMatrix>,
}

/// `{"blocks": [[[ [re, im], ... ] per row] per block]}`
#[derive(Serialize, Deserialize)]
struct ElementRepr {
    blocks: Vec<Vec<Vec<[f64; 2]>>>,
}

impl TryFrom<ElementRepr> for Element {
    type Error = Error;

    fn try_from(repr: ElementRepr) -> Result<Self> {
        let mut dims = Vec::with_capacity(repr.blocks.len());
        let mut blocks = Vec::with_capacity(repr.blocks.len());
        for (b, rows) in repr.blocks.into_iter().enumerate() {
            let k = rows.len();
            if rows.iter().any(|r| r.len() != k) {
                return Err(Error::structural(format!(
                    "element block {b} is not square"
                )));
            }
            dims.push(k);
            let flat: Vec<Complex64> = rows
                .into_iter()
                .flatten()
                .map(|[re, im]| Complex64::new(re, im))
                .collect();
            blocks.push(CMatrix::from_row_slice(k, k, &flat));
        }
        Element::from_blocks(AlgebraShape::new(dims)?, blocks)
    }
}

impl From<Element> for ElementRepr {
    fn from(e: Element) -> Self {
        let blocks = e
            .blocks
            .iter()
            .map(|m| {
                m.row_iter()
                    .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                    .collect()
            })
            .collect();
        ElementRepr { blocks }
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Element")
            .field("shape", &self.shape)
            .field("blocks", &self.blocks)
            .finish()
    }
}

impl Element {
    pub fn from_blocks(shape: AlgebraShape, blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.len() != shape.num_blocks() {
            return Err(Error::structural(format!(
                "expected {} blocks for shape {shape}, got {}",
                shape.num_blocks(),
                blocks.len()
            )));
        }
        for (b, (m, &k)) in blocks.iter().zip(shape.blocks()).enumerate() {
            if !dense::is_square(m, k) {
                return Err(Error::structural(format!(
                    "block {b} is {}x{}, shape requires {k}x{k}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(Element { shape, blocks })
    }

    /// Builds each block from `f(block_index, k)`; `f` must return a `k×k` matrix.
    pub(crate) fn from_fn(
        shape: &AlgebraShape,
        mut f: impl FnMut(usize, usize) -> CMatrix,
    ) -> Self {
        let blocks = shape
            .blocks()
            .iter()
            .enumerate()
            .map(|(b, &k)| f(b, k))
            .collect();
        Element {
            shape: shape.clone(),
            blocks,
        }
    }

    pub fn zero(shape: &AlgebraShape) -> Self {
        Element::from_fn(shape, |_, k| CMatrix::zeros(k, k))
    }

    pub fn identity(shape: &AlgebraShape) -> Self {
        Element::scalar(shape, Complex64::new(1.0, 0.0))
    }

    /// `c · 1`.
    pub fn scalar(shape: &AlgebraShape, c: Complex64) -> Self {
        Element::from_fn(shape, |_, k| CMatrix::from_diagonal_element(k, k, c))
    }

    /// Element of a commutative algebra from its coordinates (one per point).
    pub fn from_coords(coords: &[Complex64]) -> Self {
        let shape = AlgebraShape::commutative(coords.len()).expect("at least one coordinate");
        let blocks = coords
            .iter()
            .map(|&z| CMatrix::from_element(1, 1, z))
            .collect();
        Element { shape, blocks }
    }

    /// Element of a commutative algebra from real coordinates.
    pub fn from_real_coords(coords: &[f64]) -> Self {
        let coords: Vec<Complex64> = coords.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Element::from_coords(&coords)
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, b: usize) -> &CMatrix {
        &self.blocks[b]
    }

    pub fn into_blocks(self) -> Vec<CMatrix> {
        self.blocks
    }

    pub fn apply_binary(&self, op: BinaryOp, other: &Element) -> Result<Element> {
        self.shape.ensure_same(&other.shape)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| match op {
                BinaryOp::Add => a + b,
                BinaryOp::Mul => a * b,
            })
            .collect();
        Ok(Element {
            shape: self.shape.clone(),
            blocks,
        })
    }

    pub fn apply_unary(&self, op: UnaryOp) -> Element {
        let blocks = self
            .blocks
            .iter()
            .map(|a| match op {
                UnaryOp::Neg => -a,
                UnaryOp::Adjoint => a.adjoint(),
                UnaryOp::Scale(c) => a * c,
            })
            .collect();
        Element {
            shape: self.shape.clone(),
            blocks,
        }
    }

    pub fn checked_add(&self, other: &Element) -> Result<Element> {
        self.apply_binary(BinaryOp::Add, other)
    }

    pub fn checked_mul(&self, other: &Element) -> Result<Element> {
        self.apply_binary(BinaryOp::Mul, other)
    }

    pub fn checked_sub(&self, other: &Element) -> Result<Element> {
        self.checked_add(&other.apply_unary(UnaryOp::Neg))
    }

    pub fn adjoint(&self) -> Element {
        self.apply_unary(UnaryOp::Adjoint)
    }

    pub fn scale(&self, c: Complex64) -> Element {
        self.apply_unary(UnaryOp::Scale(c))
    }

    pub fn scale_real(&self, x: f64) -> Element {
        self.scale(Complex64::new(x, 0.0))
    }

    /// Jordan product `(ab + ba) / 2`.
    pub fn jordan(&self, other: &Element) -> Result<Element> {
        let ab = self.checked_mul(other)?;
        let ba = other.checked_mul(self)?;
        Ok(ab.checked_add(&ba)?.scale_real(0.5))
    }

    /// C*-norm: the largest operator norm over blocks.
    pub fn norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(dense::spectral_norm)
            .fold(0.0, f64::max)
    }

    /// `‖a − a*‖`.
    pub fn hermitian_defect(&self) -> f64 {
        self.blocks
            .iter()
            .map(|m| dense::spectral_norm(&(m - m.adjoint())))
            .fold(0.0, f64::max)
    }

    pub fn commutator_norm(&self, other: &Element) -> Result<f64> {
        let ab = self.checked_mul(other)?;
        let ba = other.checked_mul(self)?;
        Ok(ab.checked_sub(&ba)?.norm())
    }

    /// `(a + a*) / 2`, exactly self-adjoint.
    pub fn hermitian_part(&self) -> Element {
        let blocks = self.blocks.iter().map(dense::symmetrize).collect();
        Element {
            shape: self.shape.clone(),
            blocks,
        }
    }

    /// Largest entrywise deviation from `other`; zero means bitwise equal values.
    pub fn max_abs_diff(&self, other: &Element) -> Result<f64> {
        self.shape.ensure_same(&other.shape)?;
        Ok(self
            .blocks
            .iter()
            .zip(&other.blocks)
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max))
    }

    /// Positivity classification with relative tolerance `tol · max(1, ‖a‖)`.
    pub fn classify(&self, tol: f64) -> Result<SpectrumReport> {
        if !(tol > 0.0) {
            return Err(Error::Invalid(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        let threshold = tol * self.norm().max(1.0);
        let hermitian_defect = self.hermitian_defect();
        let mut min_spectrum = f64::INFINITY;
        for (b, m) in self.blocks.iter().enumerate() {
            let h = dense::symmetrize(m);
            min_spectrum = min_spectrum.min(dense::min_hermitian_eigenvalue(&h, b)?);
        }
        let is_selfadjoint = hermitian_defect <= threshold;
        let is_positive = is_selfadjoint && min_spectrum >= -threshold;
        Ok(SpectrumReport {
            is_selfadjoint,
            is_positive,
            min_spectrum,
            hermitian_defect,
        })
    }

    /// Applies `f` to the spectrum of the Hermitian part, block by block.
    pub fn map_hermitian(&self, f: impl Fn(f64) -> f64) -> Result<Element> {
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(b, m)| dense::hermitian_map(&dense::symmetrize(m), b, &f))
            .collect::<Result<Vec<_>>>()?;
        Ok(Element {
            shape: self.shape.clone(),
            blocks,
        })
    }

    /// Positive square root. Eigenvalues in `[−tol·max(1,‖a‖), 0)` are clamped to zero.
    pub fn sqrt(&self, tol: f64) -> Result<Element> {
        let report = self.classify(tol)?;
        if !report.is_positive {
            return Err(Error::NotPositiveElement {
                min_spectrum: report.min_spectrum,
            });
        }
        self.map_hermitian(|x| x.max(0.0).sqrt())
    }
}

impl Add for &Element {
    type Output = Element;

    /// # Panics
    /// Panics when the operands have different shapes; use [`Element::checked_add`] otherwise.
    fn add(self, rhs: &Element) -> Element {
        self.checked_add(rhs).expect("element shapes must agree")
    }
}

impl Sub for &Element {
    type Output = Element;

    fn sub(self, rhs: &Element) -> Element {
        self.checked_sub(rhs).expect("element shapes must agree")
    }
}

impl Mul for &Element {
    type Output = Element;

    fn mul(self, rhs: &Element) -> Element {
        self.checked_mul(rhs).expect("element shapes must agree")
    }
}

impl Neg for &Element {
    type Output = Element;

    fn neg(self) -> Element {
        self.apply_unary(UnaryOp::Neg)
    }
}
