//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero on any failure.

mod common;

use std::time::{Duration, Instant};

use common::{eig2, factorization_psd, gen, hermitian_with_spectrum, novak_scalar, shape};
use cstar_schur::verify::{
    associativity_search, check_chain_bound, check_row_sum_bound, check_trig_identities,
    check_unit_diagonal_bound, counterexample_search, jordan_witness, novak_check, run_suite,
    trig_falsification_search, RunOptions, Suite, SuiteConfig, TrigMode, ASSOCIATIVITY_GAP,
    FALSIFY_THRESHOLD, VIOLATION_MARGIN,
};
use cstar_schur::{
    cauchy_schwarz_gap, schur_quadratic_form_oracle, AMatrix, AVector, Element, GenConfig,
    Generator, Style,
};
use num_complex::Complex64;

const TOL: f64 = 1e-9;
const SEED: u64 = 20_240_611;

const SCHUR_TIME: Duration = Duration::from_secs(10);
const SEARCH_TIME: Duration = Duration::from_secs(5);
const NOVAK_CLOSED_FORM: f64 = 1e-12;
const JORDAN_TARGET: f64 = -0.202;
const JORDAN_WINDOW: f64 = 1e-3;
const TRIG_RESIDUAL: f64 = 1e-10;
const TRIG_NORM: f64 = 5.0;
const CS_EQUALITY: f64 = 1e-12;
const ORACLE_REL: f64 = 1e-10;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: cstar_schur::Error) -> String {
    e.to_string()
}

fn criterion_1() -> Outcome {
    let shapes: [&[usize]; 4] = [&[1], &[1, 1], &[1, 1, 1, 1], &[1; 8]];
    let start = Instant::now();
    let mut failures = 0;
    let mut oracle_disagree = 0;
    for t in 0..500u64 {
        let n = 2 + (t / 4 % 7) as usize;
        let mut g = gen(SEED, shapes[(t % 4) as usize], n, t);
        let (_, m) = g.random_positive_matrix();
        let (_, nn) = g.random_positive_matrix();
        let p = m.schur_product(&nn).map_err(err)?;
        let positive = p.psd_check(TOL).map_err(err)?.is_positive;
        failures += !positive as u32;
        oracle_disagree += (positive != factorization_psd(&p, TOL)) as u32;
    }
    let elapsed = start.elapsed();
    ensure(failures == 0, || format!("{failures} of 500 not positive"))?;
    ensure(oracle_disagree == 0, || {
        format!("{oracle_disagree} disagreements with factorization")
    })?;
    ensure(elapsed < SCHUR_TIME, || format!("took {elapsed:?}"))?;
    Ok(format!("500 trials, 0 failures, {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let shapes: [&[usize]; 6] = [&[1], &[1, 1], &[2], &[2, 1], &[3], &[1, 1, 1, 1]];
    let mut failures = 0;
    let mut worst = f64::INFINITY;
    for t in 0..500u64 {
        let n = 2 + (t / 6 % 5) as usize;
        let mut g = gen(SEED, shapes[(t % 6) as usize], n, t);
        let a = g.gaussian_matrix();
        let r = check_row_sum_bound(&a, TOL).map_err(err)?;
        failures += r.failures;
        worst = worst.min(r.worst_margin);
    }
    ensure(failures == 0, || format!("{failures} failing trials"))?;

    let a = AMatrix::scalar_real(&[&[1.0, 0.0], &[1.0, 1.0]]).map_err(err)?;
    let yy = AMatrix::outer_product(&a.row_sums()).scale_real(0.5);
    let gap = &(&a * &a.adjoint()) - &yy;
    let expected = AMatrix::scalar_real(&[&[0.5, 0.0], &[0.0, 0.0]]).map_err(err)?;
    let diff = gap.max_abs_diff(&expected).map_err(err)?;
    ensure(diff <= 1e-15, || format!("closed-form gap off by {diff:e}"))?;
    ensure(check_row_sum_bound(&a, TOL).map_err(err)?.passed(), || {
        "closed-form instance rejected".into()
    })?;
    Ok(format!(
        "500 trials incl. [2],[2,1],[3], worst margin {worst:+.3e}; gap [[.5,0],[0,0]]"
    ))
}

fn criterion_3() -> Outcome {
    let shapes: [&[usize]; 4] = [&[1], &[1, 1], &[1, 1, 1], &[1, 1, 1, 1]];
    let mut failures = 0;
    let mut worst = f64::INFINITY;
    for t in 0..500u64 {
        let n = 2 + (t / 4 % 5) as usize;
        let mut g = gen(SEED, shapes[(t % 4) as usize], n, t);
        let (a, b) = (g.gaussian_matrix(), g.gaussian_matrix());
        let r = check_chain_bound(&a, &b, TOL).map_err(err)?;
        failures += r.failures;
        worst = worst.min(r.worst_margin);
    }
    ensure(failures == 0, || format!("{failures} failing trials"))?;
    Ok(format!("500 trials, worst margin {worst:+.3e}"))
}

fn criterion_4() -> Outcome {
    let shapes: [&[usize]; 3] = [&[1], &[1, 1], &[1, 1, 1]];
    let mut failures = 0;
    let mut direct_gap: f64 = 0.0;
    for t in 0..200u64 {
        let n = 2 + (t % 5) as usize;
        let d = 1 + (t / 5 % 4) as usize;
        let blocks = shapes[(t / 20 % 3) as usize];
        let mut g = gen(SEED, blocks, n, t);
        let points = g.random_selfadjoint_points(d);
        let r = novak_check(&points, TOL).map_err(err)?;
        failures += (!r.psd.is_positive) as u32 + r.report.failures as u32;
        let real = GenConfig::new(SEED, shape(blocks), n).with_style(Style::RealCommutative);
        let unit = Generator::for_trial(&real, t)
            .random_unit_diagonal_positive()
            .map_err(err)?;
        failures += check_unit_diagonal_bound(&unit, TOL).map_err(err)?.failures as u32;
        if blocks == [1] {
            let x: Vec<Vec<f64>> = points
                .iter()
                .map(|row| row.iter().map(|e| e.block(0)[(0, 0)].re).collect())
                .collect();
            let oracle = novak_scalar(&x);
            for (j, row) in oracle.iter().enumerate() {
                for (k, &o) in row.iter().enumerate() {
                    let v = r.matrix.get(j, k).block(0)[(0, 0)];
                    direct_gap = direct_gap.max((v - Complex64::new(o, 0.0)).norm());
                }
            }
        }
    }
    ensure(failures == 0, || format!("{failures} failures"))?;
    ensure(direct_gap <= 1e-12, || {
        format!("matrix differs from scalar formula by {direct_gap:e}")
    })?;

    let points = vec![
        vec![Element::from_real_coords(&[0.0])],
        vec![Element::from_real_coords(&[std::f64::consts::PI])],
    ];
    let r = novak_check(&points, TOL).map_err(err)?;
    let m = &r.matrix;
    let (lo, hi) = eig2(
        m.get(0, 0).block(0)[(0, 0)].re,
        m.get(0, 1).block(0)[(0, 0)],
        m.get(1, 1).block(0)[(0, 0)].re,
    );
    ensure(
        lo.abs() <= NOVAK_CLOSED_FORM && (hi - 1.0).abs() <= NOVAK_CLOSED_FORM,
        || format!("closed form eigenvalues {lo:e}, {hi}"),
    )?;
    let reported = r.psd.min_eigenvalue();
    ensure(
        reported.abs() <= NOVAK_CLOSED_FORM && r.psd.is_positive,
        || format!("reported min eigenvalue {reported:e}"),
    )?;
    Ok(format!(
        "200 trials positive (and unit-diagonal bound); x=(0,π) eigenvalues {{{lo:.1e}, {hi:.12}}}"
    ))
}

fn criterion_5() -> Outcome {
    let s = shape(&[2]);
    let (m, n) = jordan_witness(&s, 1).map_err(err)?;
    let j = m.schur_product(&n).map_err(err)?;
    let b = j.get(0, 0).block(0);
    let (closed, _) = eig2(b[(0, 0)].re, b[(0, 1)], b[(1, 1)].re);
    let reported = j.psd_check(TOL).map_err(err)?.min_eigenvalue();
    ensure((closed - JORDAN_TARGET).abs() <= JORDAN_WINDOW, || {
        format!("closed form {closed}")
    })?;
    ensure((reported - JORDAN_TARGET).abs() <= JORDAN_WINDOW, || {
        format!("reported {reported}")
    })?;

    let start = Instant::now();
    let cfg = GenConfig::new(SEED, s, 1);
    let out = counterexample_search(&cfg, 10_000, TOL, RunOptions::default()).map_err(err)?;
    let elapsed = start.elapsed();
    let first = out.violations.first().map(|w| w.trial);
    ensure(first == Some(0), || "Jordan witness not at trial 0".into())?;
    let random = out.random_violations();
    let deep = out
        .violations
        .iter()
        .filter(|w| w.trial > 0)
        .filter_map(|w| w.report.as_ref())
        .filter(|r| r.min_eigenvalue() < -VIOLATION_MARGIN)
        .count();
    ensure(deep >= 1, || "no random violation below −1e-6".into())?;
    ensure(elapsed < SEARCH_TIME, || format!("search took {elapsed:?}"))?;
    Ok(format!(
        "Jordan min {reported:.10}; {random} random violations in 10000 trials, {elapsed:.2?}"
    ))
}

fn criterion_6() -> Outcome {
    let shapes: [&[usize]; 6] = [&[1], &[1, 1], &[1, 1, 1, 1], &[2], &[2, 1], &[3]];
    let mut worst_single: f64 = 0.0;
    let mut worst_addition: f64 = 0.0;
    let mut checked_addition = 0;
    for t in 0..200u64 {
        let blocks = shapes[(t % 6) as usize];
        let cfg = GenConfig::new(SEED, shape(blocks), 1)
            .with_entry_scale(TRIG_NORM / std::f64::consts::PI);
        let mut g = Generator::for_trial(&cfg, t);
        let x = g.random_selfadjoint_points(1).remove(0).remove(0);
        let y = g.random_selfadjoint_points(1).remove(0).remove(0);
        ensure(x.norm() <= TRIG_NORM + 1e-12, || {
            format!("‖x‖ = {}", x.norm())
        })?;
        let family = g.random_commuting_family(2, cstar_schur::generate::Spectrum::Real);
        for (a, b) in [(&x, &y), (&family[0], &family[1])] {
            let r = check_trig_identities(a, b, TOL, TrigMode::Verify).map_err(err)?;
            for res in &r.residuals {
                let Some(v) = res.residual else { continue };
                if matches!(res.item.as_str(), "iii" | "iv") {
                    worst_addition = worst_addition.max(v);
                    checked_addition += 1;
                } else {
                    worst_single = worst_single.max(v);
                }
            }
        }
    }
    ensure(worst_single <= TRIG_RESIDUAL, || {
        format!("single-argument residual {worst_single:e}")
    })?;
    ensure(worst_addition <= TRIG_RESIDUAL, || {
        format!("addition residual {worst_addition:e}")
    })?;
    ensure(checked_addition >= 400, || {
        format!("only {checked_addition} addition residuals evaluated")
    })?;

    let cfg = GenConfig::new(SEED, shape(&[2]), 1);
    let out = trig_falsification_search(&cfg, 200, TOL, RunOptions::default()).map_err(err)?;
    let best = out
        .violations
        .iter()
        .filter_map(|w| w.residual)
        .fold(0.0, f64::max);
    ensure(best > FALSIFY_THRESHOLD, || {
        format!("best residual {best:e}")
    })?;
    Ok(format!(
        "max residuals {worst_single:.1e} / {worst_addition:.1e}; noncommuting residual {best:.3}"
    ))
}

fn criterion_7() -> Outcome {
    let shapes: [&[usize]; 6] = [&[1], &[1, 1], &[1, 1, 1, 1], &[2], &[2, 1], &[3]];
    let mut failures = 0;
    let mut worst_equality: f64 = 0.0;
    for t in 0..500u64 {
        let blocks = shapes[(t % 6) as usize];
        let n = 1 + (t / 6 % 6) as usize;
        let mut g = gen(SEED, blocks, n, t);
        let (x, y) = (g.gaussian_vector(), g.gaussian_vector());
        let gap = cauchy_schwarz_gap(&x, &y).map_err(err)?;
        let m = AMatrix::from_rows(&shape(blocks), vec![vec![gap]]).map_err(err)?;
        failures += !m.psd_check(TOL).map_err(err)?.is_positive as u32;
        let e = AVector::ones(&shape(blocks), n);
        worst_equality = worst_equality.max(cauchy_schwarz_gap(&e, &e).map_err(err)?.norm());
    }
    ensure(failures == 0, || format!("{failures} gaps not positive"))?;
    ensure(worst_equality <= CS_EQUALITY, || {
        format!("equality-case gap {worst_equality:e}")
    })?;
    Ok(format!(
        "500 pairs positive; equality gap {worst_equality:.1e}"
    ))
}

fn criterion_8() -> Outcome {
    let shapes: [&[usize]; 3] = [&[1], &[1, 1], &[1, 1, 1, 1]];
    let mut worst_rel: f64 = 0.0;
    for t in 0..200u64 {
        let n = 2 + (t % 5) as usize;
        let mut g = gen(SEED, shapes[(t % 3) as usize], n, t);
        let (_, m) = g.random_positive_matrix();
        let (_, nn) = g.random_positive_matrix();
        let x = g.gaussian_vector();
        let (direct, trace) = schur_quadratic_form_oracle(&m, &nn, &x).map_err(err)?;
        let d = direct.max_abs_diff(&trace).map_err(err)?;
        worst_rel = worst_rel.max(d / direct.norm().max(trace.norm()).max(1.0));
    }
    ensure(worst_rel <= ORACLE_REL, || {
        format!("relative gap {worst_rel:e}")
    })?;

    let shapes: [&[usize]; 6] = [&[1], &[1, 1], &[1, 1, 1, 1], &[2], &[2, 1], &[3]];
    let mut disagree = 0;
    let mut counts = [0; 3];
    for t in 0..500u64 {
        let blocks = shapes[(t % 6) as usize];
        let n = 1 + (t / 6 % 5) as usize;
        let mut g = gen(SEED ^ 0x8, blocks, n, t);
        let kind = (t / 2 % 3) as usize;
        counts[kind] += 1;
        let low: f64 = g.gaussian_element().norm().clamp(0.02, 1.0);
        let bottom = match kind {
            0 => low,
            1 => 0.0,
            _ => -low,
        };
        let h = hermitian_with_spectrum(&mut g, &shape(blocks), n, |b, r| {
            if b == 0 && r == 0 {
                bottom
            } else {
                0.5 + r as f64
            }
        });
        let ours = h.psd_check(TOL).map_err(err)?.is_positive;
        disagree += (ours != factorization_psd(&h, TOL)) as u32;
    }
    ensure(disagree == 0, || format!("{disagree} disagreements"))?;
    Ok(format!(
        "quadratic-form rel gap {worst_rel:.1e}; 500 Hermitian (pos/singular/indefinite {}/{}/{}) agree",
        counts[0], counts[1], counts[2]
    ))
}

fn criterion_9() -> Outcome {
    let mut compared = Vec::new();
    for (suite, blocks) in [
        (Suite::All, &[1usize, 1][..]),
        (Suite::Schur, &[2, 1][..]),
        (Suite::Trig, &[2][..]),
    ] {
        let json = |threads| -> Result<String, String> {
            let mut cfg = SuiteConfig::new(suite, GenConfig::new(SEED, shape(blocks), 4));
            cfg.trials = 40;
            cfg.run = RunOptions {
                threads,
                timing: false,
                stop_on_first: false,
            };
            let report = run_suite(&cfg).map_err(err)?;
            serde_json::to_string(&report).map_err(|e| e.to_string())
        };
        let (one, four) = (json(1)?, json(4)?);
        ensure(one == four, || {
            format!("suite {suite} differs across threads")
        })?;
        compared.push(suite.to_string());
    }

    let shapes: [&[usize]; 5] = [&[1], &[1, 1, 1], &[2], &[2, 1], &[3, 2]];
    for t in 0..100u64 {
        let blocks = shapes[(t % 5) as usize];
        let n = 1 + (t % 6) as usize;
        let cfg = GenConfig::new(SEED, shape(blocks), n).with_style(if t % 2 == 0 {
            Style::Complex
        } else {
            Style::RealCommutative
        });
        let m = Generator::for_trial(&cfg, t).gaussian_matrix();
        let back = AMatrix::unflatten(m.flatten(), m.shape(), n).map_err(err)?;
        let exact = back
            .entries()
            .iter()
            .zip(m.entries())
            .flat_map(|(a, b)| a.blocks().iter().zip(b.blocks()))
            .all(|(a, b)| {
                a.iter().zip(b.iter()).all(|(x, y)| {
                    x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()
                })
            });
        ensure(exact, || format!("roundtrip not bitwise at trial {t}"))?;
    }
    Ok(format!(
        "suites {} identical for 1 and 4 threads; 100 roundtrips bitwise",
        compared.join(", ")
    ))
}

fn criterion_10() -> Outcome {
    let cfg = GenConfig::new(SEED, shape(&[2]), 2);
    let out = associativity_search(&cfg, 1000, TOL, RunOptions::default()).map_err(err)?;
    let best = out
        .violations
        .iter()
        .filter_map(|w| w.residual)
        .fold(0.0, f64::max);
    ensure(best > ASSOCIATIVITY_GAP, || format!("largest gap {best:e}"))?;
    let w = &out.violations[0];
    let again = w.reverify().map_err(err)?;
    ensure(again.identical, || "witness does not re-verify".into())?;
    Ok(format!(
        "{} of 1000 trials non-associative, largest gap {best:.3}, first at trial {}",
        out.violations.len(),
        w.trial
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("commutative Schur product positivity", criterion_1),
        ("row-sum lower bound", criterion_2),
        ("chain lower bound", criterion_3),
        ("Novak matrix positivity", criterion_4),
        ("noncommutative Schur probe", criterion_5),
        ("trigonometric identities", criterion_6),
        ("Cauchy-Schwarz gap", criterion_7),
        ("oracle equivalence", criterion_8),
        ("determinism", criterion_9),
        ("non-associativity", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
