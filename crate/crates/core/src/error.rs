use thiserror::Error;

use crate::algebra::AlgebraShape;
use crate::amatrix::PsdReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Operands do not live in the same algebra, or have incompatible sizes.
    #[error("structural mismatch: {0}")]
    Structural(String),

    #[error("eigensolver did not converge on block {block}")]
    NoConvergence { block: usize },

    #[error("element is not positive (min spectrum {min_spectrum:.6e})")]
    NotPositiveElement { min_spectrum: f64 },

    #[error("matrix is not positive (min eigenvalue {:.6e}, hermitian defect {:.3e})",
        .report.min_eigenvalue(), .report.hermitian_defect)]
    NotPositiveMatrix { report: Box<PsdReport> },

    #[error("operation requires a commutative algebra, got shape {0}")]
    NonCommutative(AlgebraShape),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("norm {norm:.3e} exceeds the exponential cap {cap:.3e}")]
    Range { norm: f64, cap: f64 },

    #[error("invalid argument: {0}")]
    Invalid(String),
}

impl Error {
    /// True for failures of the numerical kernels rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::Range { .. })
    }

    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }
}
