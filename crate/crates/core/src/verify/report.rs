use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amatrix::{AMatrix, PsdReport};
use crate::error::{Error, Result};
use crate::generate::{mix64, GenConfig, Generator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// A guaranteed statement; any failure is a defect.
    Verification,
    /// Outcome recorded as evidence, not asserted.
    Probe,
    /// A hunt for violations; `failures` counts hits.
    Search,
}

/// Instance that failed (or, for searches, hit), with enough data to re-run it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub check_id: String,
    pub trial: u64,
    pub substream_seed: u64,
    /// Which statement failed, e.g. `"M∘N"`.
    pub label: String,
    pub inputs: BTreeMap<String, AMatrix>,
    pub tested: AMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PsdReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

/// Result of re-running a stored witness.
#[derive(Clone, Debug, PartialEq)]
pub struct Reverification {
    /// `Some(true)` when the tested matrix was rebuilt bitwise from the inputs.
    pub rebuilt_matches: Option<bool>,
    pub report: Option<PsdReport>,
    /// The fresh certificate equals the stored one field for field.
    pub identical: bool,
}

impl Witness {
    /// Recomputes the certificate. Schur-product, associativity and
    /// addition-formula witnesses are first rebuilt from their inputs.
    pub fn reverify(&self) -> Result<Reverification> {
        let input = |k: &str| self.inputs.get(k);
        let rebuilt_matches = match self.label.as_str() {
            SCHUR_LABEL => match (input("M"), input("N")) {
                (Some(m), Some(n)) => Some(m.schur_product(n)? == self.tested),
                _ => None,
            },
            ASSOCIATIVITY_LABEL => match (input("A"), input("B"), input("C")) {
                (Some(a), Some(b), Some(c)) => {
                    let gap = a
                        .schur_product(b)?
                        .schur_product(c)?
                        .checked_sub(&a.schur_product(&b.schur_product(c)?)?)?;
                    Some(self.residual == Some(gap.norm()) && gap == self.tested)
                }
                _ => None,
            },
            ADDITION_LABEL => match (input("x"), input("y")) {
                (Some(x), Some(y)) => {
                    let (x, y) = (x.get(0, 0), y.get(0, 0));
                    let (residuals, gap) =
                        super::checks::trig_residuals(x, y, super::checks::TrigMode::Falsify)?;
                    let iv = residuals
                        .iter()
                        .find(|r| r.item == "iv")
                        .and_then(|r| r.residual);
                    Some(iv == self.residual && super::checks::as_matrix(&gap) == self.tested)
                }
                _ => None,
            },
            _ => None,
        };
        let report = match &self.report {
            Some(stored) => Some(self.tested.psd_check(stored.tol_used)?),
            None => None,
        };
        let identical = rebuilt_matches.unwrap_or(true) && report == self.report;
        Ok(Reverification {
            rebuilt_matches,
            report,
            identical,
        })
    }
}

pub(crate) const SCHUR_LABEL: &str = "M∘N";
pub(crate) const ASSOCIATIVITY_LABEL: &str = "(A∘B)∘C−A∘(B∘C)";
pub(crate) const ADDITION_LABEL: &str = "(iv)";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub kind: CheckKind,
    pub trials: u64,
    pub failures: u64,
    /// Most negative scale-relative margin seen; `failures == 0` iff `worst_margin ≥ −tol`
    /// for verification checks.
    pub worst_margin: f64,
    pub tol: f64,
    pub witness: Option<Witness>,
    #[serde(default)]
    pub notes: Vec<String>,
    /// Wall-clock seconds; zero when timing is disabled.
    pub elapsed: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.kind != CheckKind::Verification || self.failures == 0
    }
}

/// Outcome of one trial of one check.
#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub margin: f64,
    pub failed: bool,
    pub witness: Option<Witness>,
    pub notes: Vec<String>,
}

/// A named positivity statement evaluated in a trial.
pub(crate) struct Verdict {
    pub label: String,
    pub tested: AMatrix,
    pub report: PsdReport,
    /// Side conditions enter the margin only when they fail.
    pub side: bool,
}

impl Verdict {
    pub fn new(label: impl Into<String>, tested: AMatrix, tol: f64) -> Result<Self> {
        let report = tested.psd_check(tol)?;
        Ok(Verdict {
            label: label.into(),
            tested,
            report,
            side: false,
        })
    }

    pub fn side(mut self) -> Self {
        self.side = true;
        self
    }
}

/// Identifies the trial an outcome belongs to.
#[derive(Clone, Copy, Debug)]
pub(crate) struct TrialTag<'a> {
    pub check_id: &'a str,
    pub trial: u64,
    pub substream_seed: u64,
}

impl TrialOutcome {
    /// Combines positivity verdicts; the witness records the first failing one.
    /// A verdict fails when it is not positive, or with `violation = Some(t)`
    /// when its margin is below `-t`.
    pub(crate) fn from_verdicts(
        tag: TrialTag<'_>,
        inputs: &[(&str, &AMatrix)],
        verdicts: Vec<Verdict>,
        violation: Option<f64>,
    ) -> Self {
        let mut margin = f64::INFINITY;
        let mut witness = None;
        for v in verdicts {
            let m = v.report.margin();
            let failed = match violation {
                None => !v.report.is_positive,
                Some(t) => m < -t,
            };
            if failed || !v.side {
                margin = margin.min(m);
            }
            if failed && witness.is_none() {
                witness = Some(Witness {
                    check_id: tag.check_id.to_string(),
                    trial: tag.trial,
                    substream_seed: tag.substream_seed,
                    label: v.label,
                    inputs: inputs
                        .iter()
                        .map(|(k, m)| (k.to_string(), (*m).clone()))
                        .collect(),
                    tested: v.tested,
                    report: Some(v.report),
                    residual: None,
                });
            }
        }
        TrialOutcome {
            margin,
            failed: witness.is_some(),
            witness,
            notes: Vec::new(),
        }
    }

    /// A residual check: passes when `residual ≤ rtol · max(1, scale)`. The
    /// margin is expressed in units of `tol / rtol` so that it crosses `−tol`
    /// exactly where the residual crosses its own threshold.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_residual(
        tag: TrialTag<'_>,
        label: &str,
        residual: f64,
        scale: f64,
        rtol: f64,
        tol: f64,
        witness_data: impl FnOnce() -> (Vec<(&'static str, AMatrix)>, AMatrix),
    ) -> Self {
        let relative = residual / scale.max(1.0);
        let margin = -relative * (tol / rtol);
        let failed = !(relative <= rtol);
        let witness = failed.then(|| {
            let (inputs, tested) = witness_data();
            Witness {
                check_id: tag.check_id.to_string(),
                trial: tag.trial,
                substream_seed: tag.substream_seed,
                label: label.to_string(),
                inputs: inputs
                    .into_iter()
                    .map(|(k, m)| (k.to_string(), m))
                    .collect(),
                tested,
                report: None,
                residual: Some(residual),
            }
        });
        TrialOutcome {
            margin,
            failed,
            witness,
            notes: Vec::new(),
        }
    }

    pub(crate) fn merge(mut self, other: TrialOutcome) -> TrialOutcome {
        self.margin = self.margin.min(other.margin);
        self.failed |= other.failed;
        if self.witness.is_none() {
            self.witness = other.witness;
        }
        self.notes.extend(other.notes);
        self
    }

    pub(crate) fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// Execution controls shared by every randomized check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; 0 uses rayon's default pool.
    pub threads: usize,
    /// Record wall-clock time in reports. Disable for byte-identical output.
    pub timing: bool,
    /// Stop after the first failing trial.
    pub stop_on_first: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            threads: 0,
            timing: true,
            stop_on_first: false,
        }
    }
}

pub(crate) fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Seed of the per-check stream family: `mix64(seed, fnv1a(check_id))`.
pub fn check_seed(seed: u64, check_id: &str) -> u64 {
    mix64(seed, fnv1a(check_id))
}

pub(crate) fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Invalid(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(f))
}

const CHUNK: u64 = 256;

/// Evaluates trials `first..first + count` of a check in trial order, so the
/// result does not depend on the thread count. With `stop_on_first` the
/// output ends at the first failing trial.
pub(crate) fn run_outcomes<F>(
    check_id: &str,
    cfg: &GenConfig,
    first: u64,
    count: u64,
    opts: RunOptions,
    trial_fn: F,
) -> Result<Vec<TrialOutcome>>
where
    F: Fn(&mut Generator, TrialTag<'_>) -> Result<TrialOutcome> + Sync,
{
    cfg.validate()?;
    let stream_cfg = GenConfig {
        seed: check_seed(cfg.seed, check_id),
        ..cfg.clone()
    };
    let run_one = |trial: u64| {
        let mut gen = Generator::for_trial(&stream_cfg, trial);
        let tag = TrialTag {
            check_id,
            trial,
            substream_seed: mix64(stream_cfg.seed, trial),
        };
        trial_fn(&mut gen, tag)
    };

    let results: Vec<Result<TrialOutcome>> = with_pool(opts.threads, || {
        let mut out = Vec::with_capacity(count as usize);
        let end = first + count;
        let mut lo = first;
        while lo < end {
            let hi = if opts.stop_on_first {
                (lo + CHUNK).min(end)
            } else {
                end
            };
            let chunk: Vec<_> = (lo..hi).into_par_iter().map(run_one).collect();
            let stop =
                opts.stop_on_first && chunk.iter().any(|r| r.as_ref().map_or(true, |o| o.failed));
            out.extend(chunk);
            if stop {
                break;
            }
            lo = hi;
        }
        out
    })?;

    let mut outcomes = Vec::with_capacity(results.len());
    for r in results {
        let o = r?;
        let failed = o.failed;
        outcomes.push(o);
        if failed && opts.stop_on_first {
            break;
        }
    }
    Ok(outcomes)
}

/// Folds trial outcomes into a report. The witness is the lowest failing trial.
pub(crate) fn summarize(
    check_id: &str,
    kind: CheckKind,
    tol: f64,
    outcomes: Vec<TrialOutcome>,
) -> CheckReport {
    let mut report = CheckReport {
        check_id: check_id.to_string(),
        kind,
        trials: 0,
        failures: 0,
        worst_margin: f64::INFINITY,
        tol,
        witness: None,
        notes: Vec::new(),
        elapsed: 0.0,
    };
    for outcome in outcomes {
        report.trials += 1;
        report.worst_margin = report.worst_margin.min(outcome.margin);
        for note in outcome.notes {
            if !report.notes.contains(&note) {
                report.notes.push(note);
            }
        }
        if outcome.failed {
            report.failures += 1;
            if report.witness.is_none() {
                report.witness = outcome.witness;
            }
        }
    }
    report
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn run_trials<F>(
    check_id: &str,
    kind: CheckKind,
    tol: f64,
    cfg: &GenConfig,
    first: u64,
    count: u64,
    opts: RunOptions,
    trial_fn: F,
) -> Result<CheckReport>
where
    F: Fn(&mut Generator, TrialTag<'_>) -> Result<TrialOutcome> + Sync,
{
    let start = Instant::now();
    let outcomes = run_outcomes(check_id, cfg, first, count, opts, trial_fn)?;
    let mut report = summarize(check_id, kind, tol, outcomes);
    if opts.timing {
        report.elapsed = start.elapsed().as_secs_f64();
    }
    Ok(report)
}

/// Wraps a single deterministic evaluation as a one-trial report.
pub(crate) fn single(
    check_id: &str,
    kind: CheckKind,
    tol: f64,
    outcome: TrialOutcome,
) -> CheckReport {
    summarize(check_id, kind, tol, vec![outcome])
}
