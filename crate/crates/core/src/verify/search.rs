//! Randomized hunts for violations of statements that need not hold.

use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::checks::{schur_outcome, trig_outcome, TrigMode};
use super::report::{
    run_outcomes, summarize, CheckKind, CheckReport, RunOptions, TrialOutcome, Witness,
    ASSOCIATIVITY_LABEL,
};
use crate::algebra::{AlgebraShape, Element};
use crate::amatrix::AMatrix;
use crate::dense::CMatrix;
use crate::error::{Error, Result};
use crate::generate::GenConfig;

pub const SCHUR_SEARCH: &str = "schur_counterexample_search";
pub const ASSOCIATIVITY_SEARCH: &str = "associativity_search";
pub const TRIG_FALSIFICATION: &str = "trig_falsification";

/// A Schur-product search trial counts as a violation when its margin is below `−VIOLATION_MARGIN`.
pub const VIOLATION_MARGIN: f64 = 1e-6;
/// Smallest `‖(A∘B)∘C − A∘(B∘C)‖` counted as non-associative.
pub const ASSOCIATIVITY_GAP: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub report: CheckReport,
    /// Every hit, in trial order.
    pub violations: Vec<Witness>,
    /// Leading trials that run fixed instances rather than random draws.
    pub deterministic_trials: u64,
}

impl SearchOutcome {
    /// Hits among the random trials.
    pub fn random_violations(&self) -> usize {
        self.violations
            .iter()
            .filter(|w| w.trial >= self.deterministic_trials)
            .count()
    }
}

fn first_matrix_block(shape: &AlgebraShape) -> Result<usize> {
    shape.blocks().iter().position(|&k| k >= 2).ok_or_else(|| {
        Error::Invalid(format!(
            "search needs a noncommutative shape, got commutative shape {shape}"
        ))
    })
}

/// Element with `entries` (row-major 2×2) in the top-left corner of block `b`, zero elsewhere.
fn corner(shape: &AlgebraShape, b: usize, entries: [[f64; 2]; 2]) -> Element {
    let blocks = shape
        .blocks()
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let mut m = CMatrix::zeros(k, k);
            if i == b {
                for (r, row) in entries.iter().enumerate() {
                    for (c, &v) in row.iter().enumerate() {
                        m[(r, c)] = Complex64::new(v, 0.0);
                    }
                }
            }
            m
        })
        .collect();
    Element::from_blocks(shape.clone(), blocks).expect("blocks follow the shape")
}

/// `M = E_n ⊗ diag(1, .01)`, `N = E_n ⊗ [[1,1],[1,1]]` in the first block of
/// size at least two. The Jordan product of the two corners has a negative
/// eigenvalue `(1.01 − √2.0002)/2`, so `M∘N` is not positive for any `n`.
pub fn jordan_witness(shape: &AlgebraShape, n: usize) -> Result<(AMatrix, AMatrix)> {
    let b = first_matrix_block(shape)?;
    let a = corner(shape, b, [[1.0, 0.0], [0.0, 0.01]]);
    let c = corner(shape, b, [[1.0, 1.0], [1.0, 1.0]]);
    Ok((
        AMatrix::from_fn(shape, n, |_, _| a.clone()),
        AMatrix::from_fn(shape, n, |_, _| c.clone()),
    ))
}

/// Pauli `X` and `Z` in the first block of size at least two.
pub fn pauli_pair(shape: &AlgebraShape) -> Result<(Element, Element)> {
    let b = first_matrix_block(shape)?;
    Ok((
        corner(shape, b, [[0.0, 1.0], [1.0, 0.0]]),
        corner(shape, b, [[1.0, 0.0], [0.0, -1.0]]),
    ))
}

fn finish(
    check_id: &str,
    tol: f64,
    outcomes: Vec<TrialOutcome>,
    deterministic_trials: u64,
    start: Instant,
    opts: RunOptions,
) -> SearchOutcome {
    let violations = outcomes.iter().filter_map(|o| o.witness.clone()).collect();
    let mut report = summarize(check_id, CheckKind::Search, tol, outcomes);
    if opts.timing {
        report.elapsed = start.elapsed().as_secs_f64();
    }
    SearchOutcome {
        report,
        violations,
        deterministic_trials,
    }
}

/// Looks for positive `M`, `N` with `M∘N` not positive. Trial zero is the
/// deterministic [`jordan_witness`]; trials `1..=trials` draw Gram pairs.
pub fn counterexample_search(
    cfg: &GenConfig,
    trials: u64,
    tol: f64,
    opts: RunOptions,
) -> Result<SearchOutcome> {
    first_matrix_block(&cfg.shape)?;
    let start = Instant::now();
    let outcomes = run_outcomes(SCHUR_SEARCH, cfg, 0, trials + 1, opts, |gen, tag| {
        let (m, n) = if tag.trial == 0 {
            jordan_witness(&gen.config().shape, gen.config().n)?
        } else {
            (
                gen.random_positive_matrix().1,
                gen.random_positive_matrix().1,
            )
        };
        schur_outcome(tag, &m, &n, tol, Some(VIOLATION_MARGIN))
    })?;
    Ok(finish(SCHUR_SEARCH, tol, outcomes, 1, start, opts))
}

/// Looks for Gaussian `A`, `B`, `C` whose Schur products do not associate.
pub fn associativity_search(
    cfg: &GenConfig,
    trials: u64,
    tol: f64,
    opts: RunOptions,
) -> Result<SearchOutcome> {
    let start = Instant::now();
    let outcomes = run_outcomes(ASSOCIATIVITY_SEARCH, cfg, 0, trials, opts, |gen, tag| {
        let (a, b, c) = (
            gen.gaussian_matrix(),
            gen.gaussian_matrix(),
            gen.gaussian_matrix(),
        );
        let left = a.schur_product(&b)?.schur_product(&c)?;
        let right = a.schur_product(&b.schur_product(&c)?)?;
        let gap = left.checked_sub(&right)?;
        let g = gap.norm();
        let scale = (a.norm() * b.norm() * c.norm()).max(1.0);
        let hit = g > ASSOCIATIVITY_GAP;
        let witness = hit.then(|| Witness {
            check_id: tag.check_id.to_string(),
            trial: tag.trial,
            substream_seed: tag.substream_seed,
            label: ASSOCIATIVITY_LABEL.into(),
            inputs: [("A", a), ("B", b), ("C", c)]
                .into_iter()
                .map(|(k, m)| (k.to_string(), m))
                .collect(),
            tested: gap,
            report: None,
            residual: Some(g),
        });
        Ok(TrialOutcome {
            margin: -g / scale,
            failed: hit,
            witness,
            notes: Vec::new(),
        })
    })?;
    Ok(finish(ASSOCIATIVITY_SEARCH, tol, outcomes, 0, start, opts))
}

/// Evaluates the addition formulas on noncommuting pairs. Trial zero is the
/// Pauli pair `X`, `Z`; later trials draw random self-adjoint pairs.
pub fn trig_falsification_search(
    cfg: &GenConfig,
    trials: u64,
    tol: f64,
    opts: RunOptions,
) -> Result<SearchOutcome> {
    first_matrix_block(&cfg.shape)?;
    let start = Instant::now();
    let outcomes = run_outcomes(TRIG_FALSIFICATION, cfg, 0, trials + 1, opts, |gen, tag| {
        let (x, y) = if tag.trial == 0 {
            pauli_pair(&gen.config().shape)?
        } else {
            let mut pts = gen.random_selfadjoint_points(2);
            let mut row = pts.swap_remove(0);
            let y = row.pop().expect("two coordinates");
            (row.pop().expect("two coordinates"), y)
        };
        Ok(trig_outcome(tag, &x, &y, tol, TrigMode::Falsify)?.0)
    })?;
    Ok(finish(TRIG_FALSIFICATION, tol, outcomes, 1, start, opts))
}

/// Rebuilds the inputs of a trig witness as elements.
pub fn witness_elements(w: &Witness) -> Option<(Element, Element)> {
    let x = w.inputs.get("x")?.get(0, 0).clone();
    let y = w.inputs.get("y")?.get(0, 0).clone();
    Some((x, y))
}
