//! The standard Hilbert C*-module `A^n` with `⟨x, y⟩ = Σ_j x_j y_j*`.

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraShape, Element};
use crate::error::{Error, Result};

/// An `n`-tuple of elements over one algebra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VectorRepr", into = "VectorRepr")]
pub struct AVector {
    shape: AlgebraShape,
    entries: Vec<Element>,
}

#[derive(Serialize, Deserialize)]
struct VectorRepr {
    entries: Vec<Element>,
}

impl TryFrom<VectorRepr> for AVector {
    type Error = Error;

    fn try_from(repr: VectorRepr) -> Result<Self> {
        AVector::new(repr.entries)
    }
}

impl From<AVector> for VectorRepr {
    fn from(v: AVector) -> Self {
        VectorRepr { entries: v.entries }
    }
}

impl AVector {
    pub fn new(entries: Vec<Element>) -> Result<Self> {
        let first = entries
            .first()
            .ok_or_else(|| Error::Invalid("a module vector needs at least one entry".into()))?;
        let shape = first.shape().clone();
        for (j, e) in entries.iter().enumerate() {
            if e.shape() != &shape {
                return Err(Error::structural(format!(
                    "entry {j} has shape {}, expected {shape}",
                    e.shape()
                )));
            }
        }
        Ok(AVector { shape, entries })
    }

    pub fn zeros(shape: &AlgebraShape, n: usize) -> Self {
        AVector {
            shape: shape.clone(),
            entries: vec![Element::zero(shape); n],
        }
    }

    /// `e_n`: the identity of the algebra in every coordinate.
    pub fn ones(shape: &AlgebraShape, n: usize) -> Self {
        AVector {
            shape: shape.clone(),
            entries: vec![Element::identity(shape); n],
        }
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Element] {
        &self.entries
    }

    pub fn get(&self, j: usize) -> &Element {
        &self.entries[j]
    }

    pub fn into_entries(self) -> Vec<Element> {
        self.entries
    }

    fn ensure_conformable(&self, other: &AVector) -> Result<()> {
        self.shape.ensure_same(&other.shape)?;
        if self.len() != other.len() {
            return Err(Error::structural(format!(
                "vector lengths differ: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }

    /// Left module action `(a x_j)_j`.
    pub fn left_mul(&self, a: &Element) -> Result<AVector> {
        self.shape.ensure_same(a.shape())?;
        Ok(AVector {
            shape: self.shape.clone(),
            entries: self.entries.iter().map(|x| a * x).collect(),
        })
    }

    pub fn checked_add(&self, other: &AVector) -> Result<AVector> {
        self.ensure_conformable(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(AVector {
            shape: self.shape.clone(),
            entries,
        })
    }

    /// `⟨x, y⟩ = Σ_j x_j y_j*`, linear in the left argument.
    pub fn inner_product(&self, other: &AVector) -> Result<Element> {
        self.ensure_conformable(other)?;
        let mut acc = Element::zero(&self.shape);
        for (x, y) in self.entries.iter().zip(&other.entries) {
            acc = &acc + &(x * &y.adjoint());
        }
        Ok(acc)
    }

    /// Module norm `‖⟨x, x⟩‖^{1/2}`.
    pub fn norm(&self) -> f64 {
        self.inner_product(self)
            .expect("self-conformable")
            .norm()
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &AVector) -> Result<f64> {
        self.ensure_conformable(other)?;
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.max_abs_diff(b))
            .try_fold(0.0, |acc, d| Ok(f64::max(acc, d?)))
    }
}

/// `‖⟨y,y⟩‖·⟨x,x⟩ − ⟨x,y⟩⟨y,x⟩`, which is positive for every pair.
pub fn cauchy_schwarz_gap(x: &AVector, y: &AVector) -> Result<Element> {
    let xx = x.inner_product(x)?;
    let yy = y.inner_product(y)?;
    let xy = x.inner_product(y)?;
    let yx = y.inner_product(x)?;
    Ok(&xx.scale_real(yy.norm()) - &(&xy * &yx))
}
