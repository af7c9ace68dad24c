//! Theorem checks, suites of randomized trials, and counterexample searches.
//!
//! Every check yields a [`CheckReport`]. Positivity verdicts use
//! [`AMatrix::psd_check`](crate::AMatrix::psd_check) with the caller's
//! tolerance; algebraic identities are compared as residual norms against
//! [`RESIDUAL_TOL`]`·max(1, scale)`.

mod checks;
mod report;
mod search;
mod spectral;
mod suite;

pub use checks::{
    check_chain_bound, check_diagonal_bound, check_preserver, check_row_sum_bound,
    check_schur_positivity, check_trig_identities, check_unit_diagonal_bound,
    commuting_spectral_pair, cosine_gram, cosine_gram_check, novak_check, novak_matrix,
    probe_chain_bound, validate_points, NovakResult, PreserverOptions, TrigMode, TrigResidual,
    TrigResult, CHAIN_BOUND, COMMUTE_TOL, COMMUTING_SPECTRAL_SCHUR, COSINE_GRAM, DIAGONAL_BOUND,
    FALSIFY_THRESHOLD, NOVAK, ROW_SUM_BOUND, SCHUR, SERIES_PRESERVER, TRIG_IDENTITIES,
    UNIT_DIAGONAL_BOUND, UNIT_DIAGONAL_TOL,
};
pub use report::{check_seed, CheckKind, CheckReport, Reverification, RunOptions, Witness};
pub use search::{
    associativity_search, counterexample_search, jordan_witness, pauli_pair,
    trig_falsification_search, witness_elements, SearchOutcome, ASSOCIATIVITY_GAP,
    ASSOCIATIVITY_SEARCH, SCHUR_SEARCH, TRIG_FALSIFICATION, VIOLATION_MARGIN,
};
pub use spectral::{pointwise_spectral_diag, SpectralDecomposition, SPECTRAL_TOL, UNITARY_TOL};
pub use suite::{
    run_suite, Skipped, Suite, SuiteConfig, SuiteReport, CAUCHY_SCHWARZ, DIAGONAL_BOUND_COMPLEX,
    INNER_PRODUCT_LINEARITY, QUADRATIC_FORM_ORACLE, SPECTRAL_DIAG, UNIT_DIAGONAL_BOUND_COMPLEX,
};

use crate::error::Result;
use crate::generate::{GenConfig, Generator};

/// Threshold for residual cross-checks of algebraic identities.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Runs the commuting-spectral-data Schur check over `trials` generated instances.
pub fn check_commuting_spectral_schur(
    cfg: &GenConfig,
    trials: u64,
    tol: f64,
    opts: RunOptions,
) -> Result<CheckReport> {
    report::run_trials(
        COMMUTING_SPECTRAL_SCHUR,
        CheckKind::Verification,
        tol,
        cfg,
        0,
        trials,
        opts,
        |gen: &mut Generator, tag| {
            let (m, n) = commuting_spectral_pair(gen);
            checks::commuting_spectral_outcome(tag, &m, &n, tol)
        },
    )
}
