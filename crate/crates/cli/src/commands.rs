use std::io::Write;
use std::path::{Path, PathBuf};

use cstar_schur::verify::{
    self, associativity_search, counterexample_search, novak_check, run_suite,
    trig_falsification_search, CheckKind, CheckReport, NovakResult, PreserverOptions,
    SearchOutcome, Suite, SuiteConfig, SuiteReport, Witness,
};
use cstar_schur::{AMatrix, AlgebraShape, Element, Generator, Nesting};
use serde::{Deserialize, Serialize};

use crate::config::{
    load_config, read_json, settings, write_json, CliResult, Failure, Settings, EXIT_FAIL,
};
use crate::{NovakArgs, Paren, SearchArgs, SearchKind, VerifyArgs};

const DEFAULT_N: usize = 4;
const DEFAULT_D: usize = 2;
const DEFAULT_TRIALS: u64 = 100;
const SEARCH_SIZES: std::ops::RangeInclusive<usize> = 1..=4;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PointsFile {
    points: Vec<Vec<Element>>,
}

fn read_points(path: &Path) -> CliResult<Vec<Vec<Element>>> {
    Ok(read_json::<PointsFile>(path, "points file")?.points)
}

fn status(r: &CheckReport) -> &'static str {
    match (r.kind, r.failures) {
        (CheckKind::Verification, 0) => "pass",
        (CheckKind::Verification, _) => "FAIL",
        (CheckKind::Probe, 0) => "probe: holds",
        (CheckKind::Probe, _) => "probe: violated",
        (CheckKind::Search, 0) => "no hits",
        (CheckKind::Search, _) => "hits",
    }
}

fn print_check(r: &CheckReport) {
    println!(
        "  {:<34} {:<13} trials {:>6}  failures {:>6}  worst margin {:>+11.3e}  {}",
        r.check_id,
        format!("{:?}", r.kind).to_lowercase(),
        r.trials,
        r.failures,
        r.worst_margin,
        status(r)
    );
    for note in &r.notes {
        println!("      note: {note}");
    }
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    #[serde(flatten)]
    report: &'a SuiteReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    novak: Option<&'a NovakResult>,
}

pub fn verify(args: VerifyArgs) -> CliResult<u8> {
    if let Some(path) = &args.from_witness {
        return reverify_witness(path);
    }
    let file = load_config(&args.common)?;
    let s = settings(&args.common, &file, args.stop_on_first)?;
    let suite: Suite = args
        .suite
        .as_deref()
        .or(file.suite.as_deref())
        .unwrap_or("all")
        .parse()?;
    let d = args.d.or(file.d);
    if d == Some(0) {
        return Err(Failure::usage("d must be at least 1"));
    }

    let (report, novak) = match &args.points {
        Some(path) => {
            if suite != Suite::Novak {
                return Err(Failure::usage("--points requires --suite novak"));
            }
            let points = read_points(path)?;
            let result = novak_check(&points, s.tol)?;
            let shape = result.matrix.shape().clone();
            let (n, dd) = (points.len(), points[0].len());
            if s.shape_given && shape != s.shape {
                return Err(Failure::usage(format!(
                    "points live in shape {shape}, --shape says {}",
                    s.shape
                )));
            }
            if s.n.is_some_and(|v| v != n) || d.is_some_and(|v| v != dd) {
                return Err(Failure::usage(format!("points file has n = {n}, d = {dd}")));
            }
            let report = SuiteReport {
                suite,
                shape,
                n,
                d: dd,
                seed: s.seed,
                trials: 1,
                tol: s.tol,
                checks: vec![result.report.clone()],
                skipped: Vec::new(),
            };
            (report, Some(result))
        }
        None => {
            let nesting = match args.schur_power_paren.or(file.schur_power_paren) {
                Some(Paren::Right) => Nesting::Right,
                _ => Nesting::Left,
            };
            let mut cfg = SuiteConfig::new(suite, s.gen(s.n.unwrap_or(DEFAULT_N)));
            cfg.d = d.unwrap_or(DEFAULT_D);
            cfg.trials = s.trials.unwrap_or(DEFAULT_TRIALS);
            cfg.tol = s.tol;
            cfg.run = s.run;
            cfg.preserver = PreserverOptions {
                nesting,
                entrywise_constant: args.entrywise_constant
                    || file.entrywise_constant.unwrap_or(false),
            };
            (run_suite(&cfg)?, None)
        }
    };

    println!(
        "suite {} over shape {} (n = {}, d = {}, seed {}, tol {:e})",
        report.suite, report.shape, report.n, report.d, report.seed, report.tol
    );
    for r in &report.checks {
        print_check(r);
    }
    for skip in &report.skipped {
        println!("  {:<34} skipped: {}", skip.check_id, skip.reason);
    }
    if let Some(result) = &novak {
        println!(
            "  novak matrix min eigenvalue {:+.6e}",
            result.psd.min_eigenvalue()
        );
    }
    if let Some(path) = &args.common.json {
        write_json(
            path,
            &VerifyOutput {
                report: &report,
                novak: novak.as_ref(),
            },
        )?;
    }
    let failures = report.verification_failures();
    println!(
        "{}",
        if report.passed() {
            "PASS".to_string()
        } else {
            format!("FAIL ({failures} failing trials)")
        }
    );
    Ok(if report.passed() { 0 } else { EXIT_FAIL })
}

fn reverify_witness(path: &Path) -> CliResult<u8> {
    let witness: Witness = read_json(path, "witness")?;
    let again = witness.reverify()?;
    println!(
        "witness {} trial {} ({})",
        witness.check_id, witness.trial, witness.label
    );
    if let Some(rebuilt) = again.rebuilt_matches {
        println!(
            "  tested matrix rebuilt from inputs: {}",
            if rebuilt { "identical" } else { "DIFFERS" }
        );
    }
    if let (Some(old), Some(new)) = (&witness.report, &again.report) {
        println!("  stored min eigenvalue     {:+.17e}", old.min_eigenvalue());
        println!("  recomputed min eigenvalue {:+.17e}", new.min_eigenvalue());
        println!("  positive: {}", new.is_positive);
    }
    println!(
        "{}",
        if again.identical {
            "reproduced"
        } else {
            "NOT reproduced"
        }
    );
    Ok(if again.identical { 0 } else { EXIT_FAIL })
}

#[derive(Serialize)]
struct ViolationEntry {
    trial: u64,
    substream_seed: u64,
    label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_eigenvalue: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    witness_file: Option<String>,
}

#[derive(Serialize)]
struct SearchRun {
    n: usize,
    report: CheckReport,
    random_violations: usize,
    violations: Vec<ViolationEntry>,
}

#[derive(Serialize)]
struct SearchReport {
    kind: SearchKind,
    shape: AlgebraShape,
    seed: u64,
    trials: u64,
    tol: f64,
    runs: Vec<SearchRun>,
}

fn witness_dir(args: &SearchArgs) -> Option<PathBuf> {
    if let Some(dir) = &args.witness_dir {
        return Some(dir.clone());
    }
    let json = args.common.json.as_ref()?;
    let stem = json
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    Some(json.with_file_name(format!("{stem}_witnesses")))
}

fn record_run(
    n: usize,
    out: SearchOutcome,
    dir: Option<&Path>,
    max_files: usize,
) -> CliResult<SearchRun> {
    let random_violations = out.random_violations();
    let mut violations = Vec::with_capacity(out.violations.len());
    for (i, w) in out.violations.iter().enumerate() {
        let witness_file = match dir {
            Some(dir) if i < max_files => {
                let path = dir.join(format!("{}_n{n}_trial{:06}.json", w.check_id, w.trial));
                write_json(&path, w)?;
                Some(path.display().to_string())
            }
            _ => None,
        };
        violations.push(ViolationEntry {
            trial: w.trial,
            substream_seed: w.substream_seed,
            label: w.label.clone(),
            min_eigenvalue: w.report.as_ref().map(|r| r.min_eigenvalue()),
            margin: w.report.as_ref().map(|r| r.margin()),
            residual: w.residual,
            witness_file,
        });
    }
    Ok(SearchRun {
        n,
        report: out.report,
        random_violations,
        violations,
    })
}

pub fn search(args: SearchArgs) -> CliResult<u8> {
    let file = load_config(&args.common)?;
    let s = settings(&args.common, &file, args.stop_on_first)?;
    let kind = args.kind.or(file.kind).unwrap_or(SearchKind::Schur);
    if kind != SearchKind::Associativity && s.shape.is_commutative() {
        return Err(Failure::usage(format!(
            "search needs a noncommutative shape, got commutative shape {}",
            s.shape
        )));
    }
    let trials = s.trials.unwrap_or(DEFAULT_TRIALS);
    let sizes: Vec<usize> = match s.n {
        Some(n) => vec![n],
        None => SEARCH_SIZES.collect(),
    };
    let dir = witness_dir(&args);

    let mut runs = Vec::with_capacity(sizes.len());
    for n in sizes {
        let cfg = s.gen(n);
        let out = match kind {
            SearchKind::Schur => counterexample_search(&cfg, trials, s.tol, s.run)?,
            SearchKind::Associativity => associativity_search(&cfg, trials, s.tol, s.run)?,
            SearchKind::Trig => trig_falsification_search(&cfg, trials, s.tol, s.run)?,
        };
        runs.push(record_run(n, out, dir.as_deref(), args.max_witness_files)?);
    }

    println!(
        "{kind:?} search over shape {} (seed {}, {} random trials per n)",
        s.shape, s.seed, trials
    );
    for run in &runs {
        let r = &run.report;
        println!(
            "  n = {}: trials {:>6}  hits {:>6} (random {:>6})  worst margin {:>+11.3e}",
            run.n, r.trials, r.failures, run.random_violations, r.worst_margin
        );
        if let Some(first) = run.violations.first() {
            let file = first.witness_file.as_deref().unwrap_or("(not written)");
            println!(
                "      first hit: trial {} seed {:#018x} -> {file}",
                first.trial, first.substream_seed
            );
        }
    }
    if let Some(path) = &args.common.json {
        let report = SearchReport {
            kind,
            shape: s.shape.clone(),
            seed: s.seed,
            trials,
            tol: s.tol,
            runs,
        };
        write_json(path, &report)?;
    }
    Ok(0)
}

#[derive(Serialize)]
struct NovakOutput<'a> {
    points: &'a [Vec<Element>],
    #[serde(flatten)]
    result: &'a NovakResult,
}

fn random_points(s: &Settings, n: usize, d: usize) -> Vec<Vec<Element>> {
    let mut gen = Generator::new(&s.gen(n));
    let family = gen.random_commuting_family(n * d, cstar_schur::generate::Spectrum::Real);
    family.chunks(d).map(<[Element]>::to_vec).collect()
}

pub fn novak(args: NovakArgs) -> CliResult<u8> {
    let file = load_config(&args.common)?;
    let s = settings(&args.common, &file, false)?;
    let points = match (&args.points, args.random) {
        (Some(path), _) => read_points(path)?,
        (None, true) => {
            let d = args.d.or(file.d).unwrap_or(DEFAULT_D);
            if d == 0 {
                return Err(Failure::usage("d must be at least 1"));
            }
            random_points(&s, s.n.unwrap_or(DEFAULT_N), d)
        }
        (None, false) => return Err(Failure::usage("give --points FILE or --random")),
    };
    let result = novak_check(&points, s.tol)?;
    let output = NovakOutput {
        points: &points,
        result: &result,
    };
    match &args.common.json {
        Some(path) => {
            write_json(path, &output)?;
            print_check(&result.report);
            println!(
                "  novak matrix min eigenvalue {:+.6e}",
                result.psd.min_eigenvalue()
            );
        }
        None => {
            let text =
                serde_json::to_string_pretty(&output).map_err(|e| Failure::usage(e.to_string()))?;
            let _ = writeln!(std::io::stdout().lock(), "{text}");
        }
    }
    let ok = result.psd.is_positive && result.report.failures == 0;
    Ok(if ok { 0 } else { EXIT_FAIL })
}

pub fn demo() -> CliResult<u8> {
    let tol = cstar_schur::DEFAULT_TOL;
    let scalar = AlgebraShape::scalar();

    let (m, n) = verify::jordan_witness(&AlgebraShape::new(vec![2])?, 1)?;
    let product = m.schur_product(&n)?;
    let report = product.psd_check(tol)?;
    println!("Jordan product over M_2(C):");
    println!(
        "  diag(1, .01) ∘ [[1,1],[1,1]] has min eigenvalue {:+.6}",
        report.min_eigenvalue()
    );
    println!(
        "  both factors positive, product positive: {}",
        report.is_positive
    );

    let a = AMatrix::scalar_real(&[&[1.0, 0.0], &[1.0, 1.0]])?;
    let r = verify::check_row_sum_bound(&a, tol)?;
    println!(
        "Row-sum bound for A = [[1,0],[1,1]]: AA* − yy*/2 positive: {}",
        r.failures == 0
    );

    let points = vec![
        vec![Element::from_real_coords(&[0.0])],
        vec![Element::from_real_coords(&[std::f64::consts::PI])],
    ];
    let nv = novak_check(&points, tol)?;
    println!(
        "Novak matrix for x = (0, π): min eigenvalue {:+.3e}, positive: {}",
        nv.psd.min_eigenvalue(),
        nv.psd.is_positive
    );

    let (x, z) = verify::pauli_pair(&AlgebraShape::new(vec![2])?)?;
    let t = verify::check_trig_identities(&x, &z, tol, verify::TrigMode::Falsify)?;
    let iv = t
        .residuals
        .iter()
        .find(|r| r.item == "iv")
        .and_then(|r| r.residual)
        .unwrap_or(0.0);
    println!("cos(X+Z) vs cos X cos Z − sin X sin Z for Pauli X, Z: residual {iv:.4}");

    let e = AMatrix::ones(&scalar, 3);
    let sq = e.schur_product(&e)?;
    println!("E_3 ∘ E_3 = E_3: {}", sq == e);
    Ok(0)
}
