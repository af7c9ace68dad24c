//! Named collections of randomized checks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::checks::{self as c, PreserverOptions, TrigMode};
use super::report::{run_trials, CheckKind, CheckReport, RunOptions, TrialOutcome, Verdict};
use super::search::{trig_falsification_search, TRIG_FALSIFICATION};
use super::spectral::{pointwise_spectral_diag, SPECTRAL_TOL};
use super::RESIDUAL_TOL;
use crate::algebra::AlgebraShape;
use crate::amatrix::{schur_quadratic_form_oracle, AMatrix};
use crate::calculus::SeriesSpec;
use crate::error::{Error, Result};
use crate::generate::{GenConfig, Generator, Spectrum, Style};
use crate::module_an::{cauchy_schwarz_gap, AVector};

pub const QUADRATIC_FORM_ORACLE: &str = "quadratic_form_oracle";
pub const SPECTRAL_DIAG: &str = "pointwise_spectral_diag";
pub const DIAGONAL_BOUND_COMPLEX: &str = "diagonal_bound_complex_probe";
pub const UNIT_DIAGONAL_BOUND_COMPLEX: &str = "unit_diagonal_bound_complex_probe";
pub const CAUCHY_SCHWARZ: &str = "cauchy_schwarz";
pub const INNER_PRODUCT_LINEARITY: &str = "inner_product_linearity";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    All,
    Schur,
    Lowerbound,
    Corollaries,
    Novak,
    Trig,
    Preserver,
    Module,
}

impl Suite {
    pub const NAMES: [&'static str; 8] = [
        "all",
        "schur",
        "lowerbound",
        "corollaries",
        "novak",
        "trig",
        "preserver",
        "module",
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Schur => "schur",
            Suite::Lowerbound => "lowerbound",
            Suite::Corollaries => "corollaries",
            Suite::Novak => "novak",
            Suite::Trig => "trig",
            Suite::Preserver => "preserver",
            Suite::Module => "module",
        }
    }

    fn parts(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::Schur,
                Suite::Lowerbound,
                Suite::Corollaries,
                Suite::Novak,
                Suite::Trig,
                Suite::Preserver,
                Suite::Module,
            ],
            s => vec![s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => Suite::All,
            "schur" => Suite::Schur,
            "lowerbound" => Suite::Lowerbound,
            "corollaries" => Suite::Corollaries,
            "novak" => Suite::Novak,
            "trig" => Suite::Trig,
            "preserver" => Suite::Preserver,
            "module" => Suite::Module,
            other => {
                return Err(Error::Invalid(format!(
                    "unknown suite {other:?}, expected one of {}",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub gen: GenConfig,
    /// Coordinates per Novak point.
    pub d: usize,
    pub trials: u64,
    pub tol: f64,
    pub run: RunOptions,
    pub preserver: PreserverOptions,
    /// Truncation degree of the random series in the preserver check.
    pub series_degree: usize,
}

impl SuiteConfig {
    pub fn new(suite: Suite, gen: GenConfig) -> Self {
        SuiteConfig {
            suite,
            gen,
            d: 2,
            trials: 100,
            tol: crate::DEFAULT_TOL,
            run: RunOptions::default(),
            preserver: PreserverOptions::default(),
            series_degree: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub check_id: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub shape: AlgebraShape,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub trials: u64,
    pub tol: f64,
    pub checks: Vec<CheckReport>,
    pub skipped: Vec<Skipped>,
}

impl SuiteReport {
    /// Failures summed over verification checks only.
    pub fn verification_failures(&self) -> u64 {
        self.checks
            .iter()
            .filter(|r| r.kind == CheckKind::Verification)
            .map(|r| r.failures)
            .sum()
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckReport::passed)
    }
}

const NONCOMMUTATIVE: &str = "noncommutative shape: the statement assumes a commutative algebra";

struct Runner<'a> {
    cfg: &'a SuiteConfig,
    checks: Vec<CheckReport>,
    skipped: Vec<Skipped>,
}

impl Runner<'_> {
    fn run<F>(&mut self, id: &str, kind: CheckKind, gen: &GenConfig, f: F) -> Result<()>
    where
        F: Fn(&mut Generator, super::report::TrialTag<'_>) -> Result<TrialOutcome> + Sync,
    {
        let report = run_trials(
            id,
            kind,
            self.cfg.tol,
            gen,
            0,
            self.cfg.trials,
            self.cfg.run,
            f,
        )?;
        self.checks.push(report);
        Ok(())
    }

    fn skip(&mut self, id: &str, reason: &str) {
        self.skipped.push(Skipped {
            check_id: id.into(),
            reason: reason.into(),
        });
    }

    fn commutative(&self) -> bool {
        self.cfg.gen.shape.is_commutative()
    }

    fn schur(&mut self) -> Result<()> {
        let tol = self.cfg.tol;
        let gen = self.cfg.gen.clone();
        let kind = if self.commutative() {
            CheckKind::Verification
        } else {
            CheckKind::Probe
        };
        self.run(c::SCHUR, kind, &gen, |g, tag| {
            let (m, n) = (g.random_positive_matrix().1, g.random_positive_matrix().1);
            c::schur_outcome(tag, &m, &n, tol, None)
        })?;
        self.run(
            c::COMMUTING_SPECTRAL_SCHUR,
            CheckKind::Verification,
            &gen,
            |g, tag| {
                let (m, n) = c::commuting_spectral_pair(g);
                c::commuting_spectral_outcome(tag, &m, &n, tol)
            },
        )?;
        if !self.commutative() {
            self.skip(QUADRATIC_FORM_ORACLE, NONCOMMUTATIVE);
            self.skip(
                SPECTRAL_DIAG,
                "noncommutative shape: diagonalization is implemented pointwise only",
            );
            return Ok(());
        }
        self.run(
            QUADRATIC_FORM_ORACLE,
            CheckKind::Verification,
            &gen,
            |g, tag| {
                let (m, n) = (g.random_positive_matrix().1, g.gaussian_matrix());
                let x = g.gaussian_vector();
                let (direct, trace) = schur_quadratic_form_oracle(&m, &n, &x)?;
                let residual = (&direct - &trace).norm();
                let scale = m.norm() * n.norm() * x.norm() * x.norm();
                Ok(TrialOutcome::from_residual(
                    tag,
                    "⟨(M∘N)x,x⟩ vs trace form",
                    residual,
                    scale,
                    RESIDUAL_TOL,
                    tol,
                    || {
                        (
                            vec![
                                ("M", m.clone()),
                                ("N", n.clone()),
                                ("diag(x)", AMatrix::diag_matrix(&x)),
                            ],
                            c::as_matrix(&trace),
                        )
                    },
                ))
            },
        )?;
        self.run(SPECTRAL_DIAG, CheckKind::Verification, &gen, |g, tag| {
            let a = g.gaussian_matrix();
            let h = (&a + &a.adjoint()).scale_real(0.5);
            let d = pointwise_spectral_diag(&h)?;
            Ok(TrialOutcome::from_residual(
                tag,
                "U diag(λ) U*",
                d.residual,
                h.norm(),
                SPECTRAL_TOL,
                tol,
                || (vec![("M", h.clone())], d.reconstruct()),
            ))
        })
    }

    fn lowerbound(&mut self) -> Result<()> {
        let tol = self.cfg.tol;
        let gen = self.cfg.gen.clone();
        self.run(c::ROW_SUM_BOUND, CheckKind::Verification, &gen, |g, tag| {
            c::row_sum_outcome(tag, &g.gaussian_matrix(), tol)
        })?;
        if !self.commutative() {
            self.skip(c::CHAIN_BOUND, NONCOMMUTATIVE);
            return Ok(());
        }
        self.run(c::CHAIN_BOUND, CheckKind::Verification, &gen, |g, tag| {
            c::chain_outcome(tag, &g.gaussian_matrix(), &g.gaussian_matrix(), tol)
        })
    }

    fn corollaries(&mut self) -> Result<()> {
        let ids = [
            c::DIAGONAL_BOUND,
            c::UNIT_DIAGONAL_BOUND,
            DIAGONAL_BOUND_COMPLEX,
            UNIT_DIAGONAL_BOUND_COMPLEX,
        ];
        if !self.commutative() {
            for id in ids {
                self.skip(id, NONCOMMUTATIVE);
            }
            return Ok(());
        }
        let tol = self.cfg.tol;
        for (style, kind, diag_id, unit_id) in [
            (
                Style::RealCommutative,
                CheckKind::Verification,
                ids[0],
                ids[1],
            ),
            (Style::Complex, CheckKind::Probe, ids[2], ids[3]),
        ] {
            let gen = self.cfg.gen.clone().with_style(style);
            self.run(diag_id, kind, &gen, |g, tag| {
                c::diagonal_outcome(tag, &g.random_positive_matrix().1, tol)
            })?;
            self.run(unit_id, kind, &gen, |g, tag| {
                c::unit_diagonal_outcome(tag, &g.random_unit_diagonal_positive()?, tol)
            })?;
        }
        Ok(())
    }

    fn novak(&mut self) -> Result<()> {
        let tol = self.cfg.tol;
        let gen = self.cfg.gen.clone();
        let (n, d) = (gen.n, self.cfg.d);
        if d == 0 {
            return Err(Error::Invalid("d must be at least 1".into()));
        }
        self.run(c::COSINE_GRAM, CheckKind::Verification, &gen, |g, tag| {
            c::cosine_gram_outcome(tag, &g.random_commuting_family(n, Spectrum::Real), tol)
        })?;
        self.run(c::NOVAK, CheckKind::Verification, &gen, |g, tag| {
            let family = g.random_commuting_family(n * d, Spectrum::Real);
            let points: Vec<_> = family.chunks(d).map(<[_]>::to_vec).collect();
            Ok(c::novak_outcome(tag, &points, tol)?.0)
        })
    }

    fn trig(&mut self) -> Result<()> {
        let tol = self.cfg.tol;
        let gen = self.cfg.gen.clone();
        self.run(
            c::TRIG_IDENTITIES,
            CheckKind::Verification,
            &gen,
            |g, tag| {
                let mut free = g.random_selfadjoint_points(2).swap_remove(0);
                let y = free.pop().expect("two coordinates");
                let x = free.pop().expect("two coordinates");
                let pair = g.random_commuting_family(2, Spectrum::Real);
                let first = c::trig_outcome(tag, &x, &y, tol, TrigMode::Verify)?.0;
                let second = c::trig_outcome(tag, &pair[0], &pair[1], tol, TrigMode::Verify)?.0;
                Ok(first.merge(second))
            },
        )?;
        if self.commutative() {
            self.skip(TRIG_FALSIFICATION, "commutative shape: every pair commutes");
            return Ok(());
        }
        let out = trig_falsification_search(&gen, self.cfg.trials, tol, self.cfg.run)?;
        self.checks.push(out.report);
        Ok(())
    }

    fn preserver(&mut self) -> Result<()> {
        if !self.commutative() {
            self.skip(c::SERIES_PRESERVER, NONCOMMUTATIVE);
            return Ok(());
        }
        let tol = self.cfg.tol;
        let gen = self.cfg.gen.clone();
        let (degree, opts) = (self.cfg.series_degree, self.cfg.preserver);
        self.run(
            c::SERIES_PRESERVER,
            CheckKind::Verification,
            &gen,
            |g, tag| {
                let f = SeriesSpec::new((0..=degree).map(|_| g.positive_element()).collect())?;
                let m = g.random_positive_matrix().1;
                c::preserver_outcome(tag, &f, &m, tol, opts)
            },
        )
    }

    fn module(&mut self) -> Result<()> {
        let tol = self.cfg.tol;
        let gen = self.cfg.gen.clone();
        let as_column = |v: &AVector| AMatrix::diag_matrix(v);
        self.run(CAUCHY_SCHWARZ, CheckKind::Verification, &gen, |g, tag| {
            let (x, y) = (g.gaussian_vector(), g.gaussian_vector());
            let gap = c::as_matrix(&cauchy_schwarz_gap(&x, &y)?);
            let verdicts = vec![Verdict::new("‖⟨y,y⟩‖⟨x,x⟩−⟨x,y⟩⟨y,x⟩", gap, tol)?];
            let (dx, dy) = (as_column(&x), as_column(&y));
            Ok(TrialOutcome::from_verdicts(
                tag,
                &[("diag(x)", &dx), ("diag(y)", &dy)],
                verdicts,
                None,
            ))
        })?;
        self.run(
            INNER_PRODUCT_LINEARITY,
            CheckKind::Verification,
            &gen,
            |g, tag| {
                let a = g.gaussian_element();
                let (x, y, z) = (
                    g.gaussian_vector(),
                    g.gaussian_vector(),
                    g.gaussian_vector(),
                );
                let lhs = x.left_mul(&a)?.checked_add(&y)?.inner_product(&z)?;
                let rhs = &(&a * &x.inner_product(&z)?) + &y.inner_product(&z)?;
                let symmetry = (&x.inner_product(&y)?.adjoint() - &y.inner_product(&x)?).norm();
                let residual = (&lhs - &rhs).norm().max(symmetry);
                let scale = (a.norm() * x.norm() + y.norm()) * z.norm() + x.norm() * y.norm();
                Ok(TrialOutcome::from_residual(
                    tag,
                    "⟨ax+y,z⟩ = a⟨x,z⟩+⟨y,z⟩",
                    residual,
                    scale,
                    RESIDUAL_TOL,
                    tol,
                    || {
                        (
                            vec![
                                ("diag(x)", as_column(&x)),
                                ("diag(y)", as_column(&y)),
                                ("diag(z)", as_column(&z)),
                            ],
                            c::as_matrix(&lhs),
                        )
                    },
                ))
            },
        )
    }
}

/// Runs every check of the selected suite. Checks whose hypotheses cannot
/// hold for the shape are listed in `skipped` with a reason.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.gen.validate()?;
    if !(cfg.tol > 0.0) {
        return Err(Error::Invalid(format!(
            "tolerance must be positive, got {}",
            cfg.tol
        )));
    }
    let mut runner = Runner {
        cfg,
        checks: Vec::new(),
        skipped: Vec::new(),
    };
    for part in cfg.suite.parts() {
        match part {
            Suite::Schur => runner.schur()?,
            Suite::Lowerbound => runner.lowerbound()?,
            Suite::Corollaries => runner.corollaries()?,
            Suite::Novak => runner.novak()?,
            Suite::Trig => runner.trig()?,
            Suite::Preserver => runner.preserver()?,
            Suite::Module => runner.module()?,
            Suite::All => unreachable!("expanded by parts()"),
        }
    }
    Ok(SuiteReport {
        suite: cfg.suite,
        shape: cfg.gen.shape.clone(),
        n: cfg.gen.n,
        d: cfg.d,
        seed: cfg.gen.seed,
        trials: cfg.trials,
        tol: cfg.tol,
        checks: runner.checks,
        skipped: runner.skipped,
    })
}
