//! Schur products of positive matrices over finite-dimensional C*-algebras.
//!
//! Algebras are direct sums of full complex matrix blocks ([`AlgebraShape`]).
//! Matrices over them ([`AMatrix`]) carry the symmetrized Schur product
//! `½(a_{jk} b_{jk} + b_{jk} a_{jk})`, positivity certificates computed on the
//! faithful block representation, and the lower bounds built on row sums.
//! The [`verify`] module runs randomized checks of those statements and
//! searches for counterexamples where positivity is open.

pub mod algebra;
pub mod amatrix;
pub mod calculus;
mod dense;
pub mod error;
pub mod generate;
pub mod module_an;
pub mod verify;

pub use algebra::{AlgebraShape, BinaryOp, Element, SpectrumReport, UnaryOp};
pub use amatrix::{psd_check_batch, schur_quadratic_form_oracle, AMatrix, Nesting, PsdReport};
pub use calculus::{elem_cos, elem_exp, elem_sin, elem_trig, schur_series_apply, SeriesSpec, Trig};
pub use dense::CMatrix;
pub use error::{Error, Result};
pub use generate::{mix64, GenConfig, Generator, Style};
pub use module_an::{cauchy_schwarz_gap, AVector};

/// Default relative positivity tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;
