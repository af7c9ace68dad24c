//! Functional calculus on elements: exponential, sine, cosine, and
//! Schur-power series applied to matrices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::Element;
use crate::amatrix::{AMatrix, Nesting};
use crate::dense;
use crate::error::{Error, Result};

/// Default upper bound on `‖x‖` accepted by [`elem_exp`].
pub const DEFAULT_EXP_CAP: f64 = 50.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpMethod {
    /// Spectral path on exactly self-adjoint blocks, series otherwise.
    Auto,
    /// Scaling and squaring on every block.
    Series,
    /// Hermitian eigendecomposition; fails unless every block is self-adjoint.
    Spectral,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trig {
    Sin,
    Cos,
}

pub fn elem_exp(x: &Element) -> Result<Element> {
    elem_exp_with(x, ExpMethod::Auto, DEFAULT_EXP_CAP)
}

pub fn elem_exp_with(x: &Element, method: ExpMethod, cap: f64) -> Result<Element> {
    let norm = x.norm();
    if !(norm <= cap) {
        return Err(Error::Range { norm, cap });
    }
    let blocks = x
        .blocks()
        .iter()
        .enumerate()
        .map(|(b, m)| {
            let hermitian = *m == m.adjoint();
            match method {
                ExpMethod::Spectral if !hermitian => Err(Error::Invalid(format!(
                    "spectral exponential needs a self-adjoint block, block {b} is not"
                ))),
                ExpMethod::Spectral | ExpMethod::Auto if hermitian && m.nrows() > 1 => {
                    dense::hermitian_map(m, b, f64::exp)
                }
                _ => Ok(dense::expm_taylor(m)),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Element::from_blocks(x.shape().clone(), blocks)
}

/// `sin x = (e^{ix} − e^{−ix}) / 2i`, `cos x = (e^{ix} + e^{−ix}) / 2`.
pub fn elem_trig(kind: Trig, x: &Element) -> Result<Element> {
    let i = Complex64::new(0.0, 1.0);
    let plus = elem_exp(&x.scale(i))?;
    let minus = elem_exp(&x.scale(-i))?;
    Ok(match kind {
        Trig::Sin => (&plus - &minus).scale(Complex64::new(0.0, -0.5)),
        Trig::Cos => (&plus + &minus).scale_real(0.5),
    })
}

pub fn elem_sin(x: &Element) -> Result<Element> {
    elem_trig(Trig::Sin, x)
}

pub fn elem_cos(x: &Element) -> Result<Element> {
    elem_trig(Trig::Cos, x)
}

/// Coefficients `a_0, …, a_p` of a truncated power series over the algebra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeriesRepr", into = "SeriesRepr")]
pub struct SeriesSpec {
    coefficients: Vec<Element>,
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    coefficients: Vec<Element>,
}

impl TryFrom<SeriesRepr> for SeriesSpec {
    type Error = Error;

    fn try_from(repr: SeriesRepr) -> Result<Self> {
        SeriesSpec::new(repr.coefficients)
    }
}

impl From<SeriesSpec> for SeriesRepr {
    fn from(s: SeriesSpec) -> Self {
        SeriesRepr {
            coefficients: s.coefficients,
        }
    }
}

impl SeriesSpec {
    pub fn new(coefficients: Vec<Element>) -> Result<Self> {
        let first = coefficients
            .first()
            .ok_or_else(|| Error::Invalid("a series needs at least one coefficient".into()))?;
        for (q, a) in coefficients.iter().enumerate() {
            first.shape().ensure_same(a.shape()).map_err(|_| {
                Error::structural(format!(
                    "coefficient {q} has shape {}, expected {}",
                    a.shape(),
                    first.shape()
                ))
            })?;
        }
        Ok(SeriesSpec { coefficients })
    }

    pub fn coefficients(&self) -> &[Element] {
        &self.coefficients
    }

    pub fn truncation_degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Index of the first coefficient that is not positive, if any.
    pub fn first_non_positive(&self, tol: f64) -> Result<Option<usize>> {
        for (q, a) in self.coefficients.iter().enumerate() {
            if !a.classify(tol)?.is_positive {
                return Ok(Some(q));
            }
        }
        Ok(None)
    }
}

/// What multiplies `a_0` in a Schur-power series.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantTerm {
    /// `(M°)^0 = I`.
    #[default]
    Identity,
    /// `E_n`, matching classical entrywise application of `f`.
    Ones,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SeriesOptions {
    pub constant: ConstantTerm,
    pub nesting: Nesting,
}

/// `Σ_q a_q (M°)^q`, each coefficient multiplying entries from the left.
pub fn schur_series_apply(f: &SeriesSpec, m: &AMatrix, opts: SeriesOptions) -> Result<AMatrix> {
    let shape = m.shape();
    shape.ensure_same(f.coefficients[0].shape())?;
    let n = m.n();
    let constant = match opts.constant {
        ConstantTerm::Identity => AMatrix::identity(shape, n),
        ConstantTerm::Ones => AMatrix::ones(shape, n),
    };
    let mut acc = constant.left_scale(&f.coefficients[0])?;
    let mut power = m.clone();
    for (q, a) in f.coefficients.iter().enumerate().skip(1) {
        if q > 1 {
            power = match opts.nesting {
                Nesting::Left => power.schur_product(m)?,
                Nesting::Right => m.schur_product(&power)?,
            };
        }
        acc = acc.checked_add(&power.left_scale(a)?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, LN_2};

    use super::*;
    use crate::algebra::AlgebraShape;
    use crate::dense::CMatrix;

    fn real2(shape: &AlgebraShape, e: [f64; 4]) -> Element {
        let z: Vec<Complex64> = e.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Element::from_blocks(shape.clone(), vec![CMatrix::from_row_slice(2, 2, &z)]).unwrap()
    }

    #[test]
    fn exp_examples() {
        let s = AlgebraShape::new(vec![2, 1]).unwrap();
        assert_eq!(elem_exp(&Element::zero(&s)).unwrap(), Element::identity(&s));
        let e = elem_exp(&Element::from_real_coords(&[0.0, LN_2])).unwrap();
        assert!(
            e.max_abs_diff(&Element::from_real_coords(&[1.0, 2.0]))
                .unwrap()
                < 1e-15
        );

        let s2 = AlgebraShape::new(vec![2]).unwrap();
        let x = real2(&s2, [0.3, -1.2, -1.2, 2.0]);
        let u = elem_exp(&x.scale(Complex64::new(0.0, 1.0))).unwrap();
        let defect = (&(&u * &u.adjoint()) - &Element::identity(&s2)).norm();
        assert!(defect <= 1e-10, "{defect}");
    }

    #[test]
    fn exp_cap_is_range_error() {
        let big = Element::from_real_coords(&[60.0]);
        assert!(matches!(elem_exp(&big), Err(Error::Range { .. })));
        assert!(elem_exp_with(&big, ExpMethod::Auto, 100.0).is_ok());
    }

    #[test]
    fn series_and_spectral_paths_agree() {
        let s2 = AlgebraShape::new(vec![2]).unwrap();
        let x = real2(&s2, [1.5, -0.7, -0.7, -3.0]);
        let a = elem_exp_with(&x, ExpMethod::Series, DEFAULT_EXP_CAP).unwrap();
        let b = elem_exp_with(&x, ExpMethod::Spectral, DEFAULT_EXP_CAP).unwrap();
        assert!((&a - &b).norm() <= 1e-12 * b.norm());
        let skew = real2(&s2, [0.0, 1.0, -1.0, 0.0]);
        assert!(elem_exp_with(&skew, ExpMethod::Spectral, DEFAULT_EXP_CAP).is_err());
    }

    #[test]
    fn trig_examples() {
        let s = AlgebraShape::new(vec![1, 2]).unwrap();
        let zero = Element::zero(&s);
        assert!(
            elem_cos(&zero)
                .unwrap()
                .max_abs_diff(&Element::identity(&s))
                .unwrap()
                < 1e-15
        );
        assert!(elem_sin(&zero).unwrap().norm() < 1e-15);
        let one = elem_sin(&Element::from_real_coords(&[FRAC_PI_2])).unwrap();
        assert!(
            one.max_abs_diff(&Element::from_real_coords(&[1.0]))
                .unwrap()
                < 1e-15
        );

        let coords = [0.3, -2.5];
        let x = Element::from_real_coords(&coords);
        let sx = elem_sin(&x).unwrap();
        let cx = elem_cos(&x).unwrap();
        for (b, &t) in coords.iter().enumerate() {
            assert!((sx.block(b)[(0, 0)] - Complex64::new(t.sin(), 0.0)).norm() <= 1e-12);
            assert!((cx.block(b)[(0, 0)] - Complex64::new(t.cos(), 0.0)).norm() <= 1e-12);
        }
    }

    #[test]
    fn series_examples() {
        let s = AlgebraShape::scalar();
        let m = AMatrix::scalar_real(&[&[2.0, 0.5], &[0.5, 1.0]]).unwrap();
        let one = Element::identity(&s);
        let zero = Element::zero(&s);

        let constant = SeriesSpec::new(vec![one.clone()]).unwrap();
        assert_eq!(
            schur_series_apply(&constant, &m, SeriesOptions::default()).unwrap(),
            AMatrix::identity(&s, 2)
        );

        let linear = SeriesSpec::new(vec![zero.clone(), one.clone()]).unwrap();
        assert_eq!(
            schur_series_apply(&linear, &m, SeriesOptions::default()).unwrap(),
            m
        );

        let e = AMatrix::ones(&s, 2);
        let square = SeriesSpec::new(vec![zero.clone(), zero, one.clone()]).unwrap();
        assert_eq!(
            schur_series_apply(&square, &e, SeriesOptions::default()).unwrap(),
            e
        );

        let opts = SeriesOptions {
            constant: ConstantTerm::Ones,
            ..Default::default()
        };
        assert_eq!(schur_series_apply(&constant, &m, opts).unwrap(), e);

        assert_eq!(square.truncation_degree(), 2);
        assert!(SeriesSpec::new(vec![]).is_err());
        let bad = SeriesSpec::new(vec![
            one.clone(),
            Element::identity(&AlgebraShape::new(vec![2]).unwrap()),
        ]);
        assert!(bad.is_err());
        let neg = SeriesSpec::new(vec![one, Element::from_real_coords(&[-1.0])]).unwrap();
        assert_eq!(neg.first_non_positive(1e-9).unwrap(), Some(1));
    }

    #[test]
    fn series_json() {
        let spec: SeriesSpec = serde_json::from_str(
            r#"{"coefficients":[{"blocks":[[[[1,0]]]]},{"blocks":[[[[0.5,0]]]]}]}"#,
        )
        .unwrap();
        assert_eq!(spec.truncation_degree(), 1);
    }
}
