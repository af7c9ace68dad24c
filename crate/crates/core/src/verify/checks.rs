//! Instance-level checks. Each evaluates one concrete input and returns a
//! one-trial [`CheckReport`]; the randomized suites drive the same code.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::report::{single, CheckKind, CheckReport, TrialOutcome, TrialTag, Verdict};
use super::RESIDUAL_TOL;
use crate::algebra::{AlgebraShape, Element};
use crate::amatrix::{AMatrix, Nesting, PsdReport};
use crate::calculus::{
    elem_cos, elem_sin, schur_series_apply, ConstantTerm, SeriesOptions, SeriesSpec,
};
use crate::error::{Error, Result};
use crate::generate::{Generator, Spectrum};
use crate::module_an::AVector;

pub const SCHUR: &str = "schur_positivity";
pub const ROW_SUM_BOUND: &str = "row_sum_bound";
pub const CHAIN_BOUND: &str = "chain_bound";
pub const DIAGONAL_BOUND: &str = "diagonal_bound";
pub const UNIT_DIAGONAL_BOUND: &str = "unit_diagonal_bound";
pub const NOVAK: &str = "novak";
pub const COSINE_GRAM: &str = "cosine_gram";
pub const TRIG_IDENTITIES: &str = "trig_identities";
pub const SERIES_PRESERVER: &str = "series_preserver";
pub const COMMUTING_SPECTRAL_SCHUR: &str = "commuting_spectral_schur";

/// Largest `‖xy − yx‖` for which elements are treated as commuting.
pub const COMMUTE_TOL: f64 = 1e-10;
/// Allowed deviation of diagonal entries from one for unit-diagonal inputs.
pub const UNIT_DIAGONAL_TOL: f64 = 1e-8;

pub(crate) fn instance(check_id: &str) -> TrialTag<'_> {
    TrialTag {
        check_id,
        trial: 0,
        substream_seed: 0,
    }
}

pub(crate) fn as_matrix(x: &Element) -> AMatrix {
    AMatrix::from_fn(x.shape(), 1, |_, _| x.clone())
}

fn require_positive(name: &str, m: &AMatrix, tol: f64) -> Result<()> {
    let report = m.psd_check(tol)?;
    if report.is_positive {
        Ok(())
    } else {
        Err(Error::Hypothesis(format!(
            "{name} is not positive (margin {:e})",
            report.margin()
        )))
    }
}

fn require_commutative(shape: &AlgebraShape) -> Result<()> {
    if shape.is_commutative() {
        Ok(())
    } else {
        Err(Error::NonCommutative(shape.clone()))
    }
}

fn is_real(m: &AMatrix) -> bool {
    m.entries()
        .iter()
        .all(|e| e.blocks().iter().all(|b| b.iter().all(|z| z.im == 0.0)))
}

/// Verdicts for `lhs ⪰ rhs`: the difference first, then each side on its own,
/// so both readings of the order are on record.
fn loewner(lhs: (&str, &AMatrix), rhs: (&str, &AMatrix), tol: f64) -> Result<Vec<Verdict>> {
    Ok(vec![
        Verdict::new(
            format!("{}−{}", lhs.0, rhs.0),
            lhs.1.checked_sub(rhs.1)?,
            tol,
        )?,
        Verdict::new(lhs.0, lhs.1.clone(), tol)?.side(),
        Verdict::new(rhs.0, rhs.1.clone(), tol)?.side(),
    ])
}

const LOEWNER_NOTE: &str = "order checked as a difference and with both sides positive";

pub(crate) fn schur_outcome(
    tag: TrialTag<'_>,
    m: &AMatrix,
    n: &AMatrix,
    tol: f64,
    violation: Option<f64>,
) -> Result<TrialOutcome> {
    require_positive("M", m, tol)?;
    require_positive("N", n, tol)?;
    let product = m.schur_product(n)?;
    let verdicts = vec![Verdict::new(super::report::SCHUR_LABEL, product, tol)?];
    Ok(TrialOutcome::from_verdicts(
        tag,
        &[("M", m), ("N", n)],
        verdicts,
        violation,
    ))
}

/// Positivity of `M∘N` for positive `M`, `N`. Guaranteed over commutative
/// shapes; elsewhere the verdict is recorded as a probe.
pub fn check_schur_positivity(m: &AMatrix, n: &AMatrix, tol: f64) -> Result<CheckReport> {
    let kind = if m.shape().is_commutative() {
        CheckKind::Verification
    } else {
        CheckKind::Probe
    };
    Ok(single(
        SCHUR,
        kind,
        tol,
        schur_outcome(instance(SCHUR), m, n, tol, None)?,
    ))
}

pub(crate) fn row_sum_outcome(tag: TrialTag<'_>, a: &AMatrix, tol: f64) -> Result<TrialOutcome> {
    let inv_n = 1.0 / a.n() as f64;
    let m = a.checked_mul(&a.adjoint())?;
    let yy = AMatrix::outer_product(&a.row_sums()).scale_real(inv_n);
    let a_positive = a.psd_check(tol)?.is_positive;
    let verdicts = loewner(("AA*", &m), ("yy*/n", &yy), tol)?;
    Ok(
        TrialOutcome::from_verdicts(tag, &[("A", a)], verdicts, None)
            .with_note(LOEWNER_NOTE)
            .with_note(if a_positive {
                "input A positive"
            } else {
                "input A not positive"
            }),
    )
}

/// `AA* ⪰ (1/n) y y*` with `y` the row sums of `A`, over any shape.
pub fn check_row_sum_bound(a: &AMatrix, tol: f64) -> Result<CheckReport> {
    Ok(single(
        ROW_SUM_BOUND,
        CheckKind::Verification,
        tol,
        row_sum_outcome(instance(ROW_SUM_BOUND), a, tol)?,
    ))
}

pub(crate) fn chain_outcome(
    tag: TrialTag<'_>,
    a: &AMatrix,
    b: &AMatrix,
    tol: f64,
) -> Result<TrialOutcome> {
    let inv_n = 1.0 / a.n() as f64;
    let m = a.checked_mul(&a.adjoint())?;
    let n = b.checked_mul(&b.adjoint())?;
    let c = a.schur_product(b)?;
    let mn = m.schur_product(&n)?;
    let cc = c.checked_mul(&c.adjoint())?;
    let yy = AMatrix::outer_product(&c.row_sums()).scale_real(inv_n);
    let mut verdicts = loewner(("M∘N", &mn), ("CC*", &cc), tol)?;
    verdicts.extend(loewner(("CC*", &cc), ("yy*/n", &yy), tol)?);
    Ok(
        TrialOutcome::from_verdicts(tag, &[("A", a), ("B", b)], verdicts, None)
            .with_note(LOEWNER_NOTE),
    )
}

/// `M∘N ⪰ CC* ⪰ (1/n) y y*` with `M = AA*`, `N = BB*`, `C = A∘B`, `y` the row
/// sums of `C`. Requires a commutative shape.
pub fn check_chain_bound(a: &AMatrix, b: &AMatrix, tol: f64) -> Result<CheckReport> {
    require_commutative(a.shape())?;
    Ok(single(
        CHAIN_BOUND,
        CheckKind::Verification,
        tol,
        chain_outcome(instance(CHAIN_BOUND), a, b, tol)?,
    ))
}

/// The chain over any shape, recorded without asserting it.
pub fn probe_chain_bound(a: &AMatrix, b: &AMatrix, tol: f64) -> Result<CheckReport> {
    Ok(single(
        CHAIN_BOUND,
        CheckKind::Probe,
        tol,
        chain_outcome(instance(CHAIN_BOUND), a, b, tol)?,
    ))
}

pub(crate) fn diagonal_outcome(tag: TrialTag<'_>, m: &AMatrix, tol: f64) -> Result<TrialOutcome> {
    require_commutative(m.shape())?;
    require_positive("M", m, tol)?;
    let mm = m.schur_product(m)?;
    let dd = AMatrix::outer_product(&m.diag_vector()).scale_real(1.0 / m.n() as f64);
    let verdicts = loewner(("M∘M", &mm), ("dd*/n", &dd), tol)?;
    Ok(TrialOutcome::from_verdicts(tag, &[("M", m)], verdicts, None).with_note(LOEWNER_NOTE))
}

fn real_kind(m: &AMatrix) -> (CheckKind, Option<&'static str>) {
    if is_real(m) {
        (CheckKind::Verification, None)
    } else {
        (
            CheckKind::Probe,
            Some("complex entries: bound recorded, not asserted"),
        )
    }
}

/// `M∘M ⪰ (1/n) d d*` with `d = diag M`. Asserted for real entries; complex
/// inputs are probed.
pub fn check_diagonal_bound(m: &AMatrix, tol: f64) -> Result<CheckReport> {
    let (kind, note) = real_kind(m);
    let mut outcome = diagonal_outcome(instance(DIAGONAL_BOUND), m, tol)?;
    outcome.notes.extend(note.map(String::from));
    Ok(single(DIAGONAL_BOUND, kind, tol, outcome))
}

pub(crate) fn unit_diagonal_outcome(
    tag: TrialTag<'_>,
    m: &AMatrix,
    tol: f64,
) -> Result<TrialOutcome> {
    require_commutative(m.shape())?;
    require_positive("M", m, tol)?;
    let n = m.n();
    let off = m.diag_vector().max_abs_diff(&AVector::ones(m.shape(), n))?;
    if off > UNIT_DIAGONAL_TOL {
        return Err(Error::Hypothesis(format!(
            "diagonal entries of M are not all one (deviation {off:e})"
        )));
    }
    let mm = m.schur_product(m)?;
    let e = AMatrix::ones(m.shape(), n).scale_real(1.0 / n as f64);
    let verdicts = loewner(("M∘M", &mm), ("E/n", &e), tol)?;
    Ok(TrialOutcome::from_verdicts(tag, &[("M", m)], verdicts, None).with_note(LOEWNER_NOTE))
}

/// `M∘M ⪰ (1/n) E_n` for positive `M` with unit diagonal.
pub fn check_unit_diagonal_bound(m: &AMatrix, tol: f64) -> Result<CheckReport> {
    let (kind, note) = real_kind(m);
    let mut outcome = unit_diagonal_outcome(instance(UNIT_DIAGONAL_BOUND), m, tol)?;
    outcome.notes.extend(note.map(String::from));
    Ok(single(UNIT_DIAGONAL_BOUND, kind, tol, outcome))
}

fn require_selfadjoint(x: &Element, what: impl FnOnce() -> String, tol: f64) -> Result<()> {
    if x.hermitian_defect() <= tol * x.norm().max(1.0) {
        Ok(())
    } else {
        Err(Error::Hypothesis(format!("{} is not self-adjoint", what())))
    }
}

/// Errors unless the elements pairwise commute (always true over commutative shapes).
fn require_commuting(items: &[(String, &Element)]) -> Result<()> {
    let Some((_, first)) = items.first() else {
        return Ok(());
    };
    if first.shape().is_commutative() {
        return Ok(());
    }
    for (i, (name_a, a)) in items.iter().enumerate() {
        for (name_b, b) in &items[i + 1..] {
            let c = a.commutator_norm(b)?;
            if c > COMMUTE_TOL * (a.norm() * b.norm()).max(1.0) {
                return Err(Error::Hypothesis(format!(
                    "{name_a} and {name_b} do not commute (‖xy − yx‖ = {c:e})"
                )));
            }
        }
    }
    Ok(())
}

/// `[cos(z_j − z_k)]`.
pub fn cosine_gram(z: &[Element]) -> Result<AMatrix> {
    let shape = z
        .first()
        .ok_or_else(|| Error::Invalid("need at least one element".into()))?
        .shape()
        .clone();
    let mut rows = Vec::with_capacity(z.len());
    for zj in z {
        let row = z
            .iter()
            .map(|zk| elem_cos(&zj.checked_sub(zk)?))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    AMatrix::from_rows(&shape, rows)
}

fn validate_sequence(z: &[Element], tol: f64) -> Result<()> {
    let first = z
        .first()
        .ok_or_else(|| Error::Invalid("need at least one element".into()))?;
    for (j, x) in z.iter().enumerate() {
        first.shape().ensure_same(x.shape())?;
        require_selfadjoint(x, || format!("z[{j}]"), tol)?;
    }
    let named: Vec<_> = z
        .iter()
        .enumerate()
        .map(|(j, x)| (format!("z[{j}]"), x))
        .collect();
    require_commuting(&named)
}

pub(crate) fn cosine_gram_outcome(
    tag: TrialTag<'_>,
    z: &[Element],
    tol: f64,
) -> Result<TrialOutcome> {
    validate_sequence(z, tol)?;
    let shape = z[0].shape().clone();
    let n = z.len();
    let a = cosine_gram(z)?;
    let c = z.iter().map(elem_cos).collect::<Result<Vec<_>>>()?;
    let s = z.iter().map(elem_sin).collect::<Result<Vec<_>>>()?;

    // Entrywise addition formula and the two-Gram decomposition of the form
    // ⟨Ax, x⟩ = u*u + v*v for scalar probes x_k = ξ_k·1.
    let mut residual = 0.0f64;
    let mut scale = a.norm();
    for j in 0..n {
        for k in 0..n {
            let split = &(&c[j] * &c[k]) + &(&s[j] * &s[k]);
            residual = residual.max((a.get(j, k) - &split).norm());
        }
    }
    let probes: [Box<dyn Fn(usize) -> Complex64>; 3] = [
        Box::new(|_| Complex64::new(1.0, 0.0)),
        Box::new(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64)),
        Box::new(|k| Complex64::new(k as f64 + 1.0, -(k as f64) * 0.5)),
    ];
    for probe in &probes {
        let xi: Vec<Complex64> = (0..n).map(probe).collect();
        let x = AVector::new(xi.iter().map(|&w| Element::scalar(&shape, w)).collect())?;
        let form = a.apply(&x)?.inner_product(&x)?;
        let u = xi
            .iter()
            .zip(&c)
            .fold(Element::zero(&shape), |acc, (&w, ck)| &acc + &ck.scale(w));
        let v = xi
            .iter()
            .zip(&s)
            .fold(Element::zero(&shape), |acc, (&w, sk)| &acc + &sk.scale(w));
        let gram = &(&u.adjoint() * &u) + &(&v.adjoint() * &v);
        residual = residual.max((&form - &gram).norm());
        scale = scale.max(a.norm() * x.norm() * x.norm());
    }

    let verdict = Verdict::new("A", a.clone(), tol)?;
    let z_row = AMatrix::from_fn(&shape, n, |j, k| {
        if j == k {
            z[j].clone()
        } else {
            Element::zero(&shape)
        }
    });
    let psd = TrialOutcome::from_verdicts(tag, &[("diag(z)", &z_row)], vec![verdict], None);
    let cross = TrialOutcome::from_residual(
        tag,
        "two-Gram decomposition",
        residual,
        scale,
        RESIDUAL_TOL,
        tol,
        || (vec![("diag(z)", z_row.clone())], a.clone()),
    );
    Ok(psd.merge(cross))
}

/// Positivity of `[cos(z_j − z_k)]` for pairwise commuting self-adjoint `z`,
/// cross-checked against `cos z_j cos z_k + sin z_j sin z_k`.
pub fn cosine_gram_check(z: &[Element], tol: f64) -> Result<CheckReport> {
    Ok(single(
        COSINE_GRAM,
        CheckKind::Verification,
        tol,
        cosine_gram_outcome(instance(COSINE_GRAM), z, tol)?,
    ))
}

/// Output of [`novak_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NovakResult {
    /// `[∏_l (1 + cos(x_{j,l} − x_{k,l}))/2 − 1/n]`.
    pub matrix: AMatrix,
    pub psd: PsdReport,
    pub report: CheckReport,
}

/// Checks an `n×d` array of points and returns `(shape, n, d)`.
pub fn validate_points(points: &[Vec<Element>], tol: f64) -> Result<(AlgebraShape, usize, usize)> {
    let n = points.len();
    let d = points.first().map_or(0, Vec::len);
    if n == 0 || d == 0 {
        return Err(Error::Invalid(
            "need n ≥ 1 points with d ≥ 1 coordinates".into(),
        ));
    }
    let shape = points[0][0].shape().clone();
    let mut named = Vec::with_capacity(n * d);
    for (j, row) in points.iter().enumerate() {
        if row.len() != d {
            return Err(Error::structural(format!(
                "point {j} has {} coordinates, expected {d}",
                row.len()
            )));
        }
        for (l, x) in row.iter().enumerate() {
            shape.ensure_same(x.shape())?;
            require_selfadjoint(x, || format!("point ({j}, {l})"), tol)?;
            named.push((format!("point ({j}, {l})"), x));
        }
    }
    require_commuting(&named)?;
    Ok((shape, n, d))
}

/// The Novak matrix from its defining formula, products taken left to right.
pub fn novak_matrix(points: &[Vec<Element>]) -> Result<AMatrix> {
    let n = points.len();
    let shape = points[0][0].shape().clone();
    let one = Element::identity(&shape);
    let inv_n = Element::scalar(&shape, Complex64::new(1.0 / n as f64, 0.0));
    let mut rows = Vec::with_capacity(n);
    for xj in points {
        let mut row = Vec::with_capacity(n);
        for xk in points {
            let mut prod = one.clone();
            for (a, b) in xj.iter().zip(xk) {
                let half = (&one + &elem_cos(&a.checked_sub(b)?)?).scale_real(0.5);
                prod = &prod * &half;
            }
            row.push(&prod - &inv_n);
        }
        rows.push(row);
    }
    AMatrix::from_rows(&shape, rows)
}

pub(crate) fn novak_outcome(
    tag: TrialTag<'_>,
    points: &[Vec<Element>],
    tol: f64,
) -> Result<(TrialOutcome, AMatrix, PsdReport)> {
    let (shape, n, d) = validate_points(points, tol)?;
    let mut outcome: Option<TrialOutcome> = None;
    let mut push = |o: TrialOutcome| {
        outcome = Some(match outcome.take() {
            Some(acc) => acc.merge(o),
            None => o,
        })
    };

    // Witness inputs: one diagonal matrix per coordinate.
    let inputs: Vec<AMatrix> = (0..d)
        .map(|l| {
            AMatrix::from_fn(&shape, n, |j, k| {
                if j == k {
                    points[j][l].clone()
                } else {
                    Element::zero(&shape)
                }
            })
        })
        .collect();
    let input_refs: Vec<(String, &AMatrix)> = inputs
        .iter()
        .enumerate()
        .map(|(l, m)| (format!("diag(x_{l})"), m))
        .collect();
    let input_view: Vec<(&str, &AMatrix)> =
        input_refs.iter().map(|(k, m)| (k.as_str(), *m)).collect();

    let mut product: Option<AMatrix> = None;
    for l in 0..d {
        let z: Vec<Element> = points.iter().map(|row| row[l].scale_real(0.5)).collect();
        let ml = cosine_gram(&z)?;
        push(TrialOutcome::from_verdicts(
            tag,
            &input_view,
            vec![Verdict::new(format!("M_{l}"), ml.clone(), tol)?],
            None,
        ));
        product = Some(match product {
            None => ml,
            Some(acc) => acc.schur_product(&ml)?,
        });
    }
    let m = product.expect("d ≥ 1");
    push(TrialOutcome::from_verdicts(
        tag,
        &input_view,
        vec![Verdict::new("M", m.clone(), tol)?],
        None,
    ));

    let diag_dev = m.diag_vector().max_abs_diff(&AVector::ones(&shape, n))?;
    push(TrialOutcome::from_residual(
        tag,
        "diag M = e",
        diag_dev,
        1.0,
        RESIDUAL_TOL,
        tol,
        || (vec![("M", m.clone())], m.clone()),
    ));

    let novak = m
        .schur_product(&m)?
        .checked_sub(&AMatrix::ones(&shape, n).scale_real(1.0 / n as f64))?;
    let psd = novak.psd_check(tol)?;
    push(TrialOutcome::from_verdicts(
        tag,
        &input_view,
        vec![Verdict {
            label: "M∘M−E/n".into(),
            tested: novak.clone(),
            report: psd.clone(),
            side: false,
        }],
        None,
    ));

    let direct = novak_matrix(points)?;
    let dev = novak.max_abs_diff(&direct)?;
    push(TrialOutcome::from_residual(
        tag,
        "defining formula",
        dev,
        novak.norm(),
        RESIDUAL_TOL,
        tol,
        || (vec![("M∘M−E/n", novak.clone())], direct.clone()),
    ));

    Ok((outcome.expect("at least one verdict"), novak, psd))
}

/// Positivity of the Novak matrix for pairwise commuting self-adjoint points,
/// following the proof: cosine Grams `M_l` at half angles, their Schur product
/// `M` with unit diagonal, then `M∘M − (1/n)E_n`.
pub fn novak_check(points: &[Vec<Element>], tol: f64) -> Result<NovakResult> {
    let (outcome, matrix, psd) = novak_outcome(instance(NOVAK), points, tol)?;
    Ok(NovakResult {
        matrix,
        psd,
        report: single(NOVAK, CheckKind::Verification, tol, outcome),
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrigMode {
    /// Assert every identity whose hypotheses hold.
    #[default]
    Verify,
    /// Evaluate the addition formulas on any pair and report a hit when the
    /// cosine formula is off by more than [`FALSIFY_THRESHOLD`].
    Falsify,
}

pub const FALSIFY_THRESHOLD: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigResidual {
    /// Roman numeral of the identity, `"i"` to `"vii"`.
    pub item: String,
    pub identity: String,
    /// `None` when skipped (addition formulas on a noncommuting pair).
    pub residual: Option<f64>,
    pub scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigResult {
    pub report: CheckReport,
    pub residuals: Vec<TrigResidual>,
}

pub(crate) fn trig_residuals(
    x: &Element,
    y: &Element,
    mode: TrigMode,
) -> Result<(Vec<TrigResidual>, Element)> {
    x.shape().ensure_same(y.shape())?;
    let one = Element::identity(x.shape());
    let (sx, cx) = (elem_sin(x)?, elem_cos(x)?);
    let (sy, cy) = (elem_sin(y)?, elem_cos(y)?);
    let neg = x.scale_real(-1.0);
    let xa = x.adjoint();
    let commuting = x.commutator_norm(y)? <= COMMUTE_TOL * (x.norm() * y.norm()).max(1.0);
    let addition = commuting || mode == TrigMode::Falsify;

    let mut out = Vec::with_capacity(7);
    let push =
        |out: &mut Vec<TrigResidual>, item: &str, identity: &str, lhs: &Element, rhs: &Element| {
            out.push(TrigResidual {
                item: item.into(),
                identity: identity.into(),
                residual: Some((lhs - rhs).norm()),
                scale: lhs.norm().max(rhs.norm()),
            });
        };
    push(
        &mut out,
        "i",
        "sin(−x) = −sin x",
        &elem_sin(&neg)?,
        &sx.scale_real(-1.0),
    );
    push(&mut out, "ii", "cos(−x) = cos x", &elem_cos(&neg)?, &cx);
    let mut cos_gap = Element::zero(x.shape());
    if addition {
        let sum = x.checked_add(y)?;
        push(
            &mut out,
            "iii",
            "sin(x+y) = sin x cos y + cos x sin y",
            &elem_sin(&sum)?,
            &(&(&sx * &cy) + &(&cx * &sy)),
        );
        let lhs = elem_cos(&sum)?;
        let rhs = &(&cx * &cy) - &(&sx * &sy);
        cos_gap = &lhs - &rhs;
        push(
            &mut out,
            "iv",
            "cos(x+y) = cos x cos y − sin x sin y",
            &lhs,
            &rhs,
        );
    } else {
        for (item, identity) in [
            ("iii", "sin(x+y) = sin x cos y + cos x sin y"),
            ("iv", "cos(x+y) = cos x cos y − sin x sin y"),
        ] {
            out.push(TrigResidual {
                item: item.into(),
                identity: identity.into(),
                residual: None,
                scale: 0.0,
            });
        }
    }
    push(
        &mut out,
        "v",
        "(sin x)* = sin x*",
        &sx.adjoint(),
        &elem_sin(&xa)?,
    );
    push(
        &mut out,
        "vi",
        "(cos x)* = cos x*",
        &cx.adjoint(),
        &elem_cos(&xa)?,
    );
    push(
        &mut out,
        "vii",
        "sin²x + cos²x = 1",
        &(&(&sx * &sx) + &(&cx * &cx)),
        &one,
    );
    Ok((out, cos_gap))
}

pub(crate) fn trig_outcome(
    tag: TrialTag<'_>,
    x: &Element,
    y: &Element,
    tol: f64,
    mode: TrigMode,
) -> Result<(TrialOutcome, Vec<TrigResidual>)> {
    let (residuals, cos_gap) = trig_residuals(x, y, mode)?;
    let inputs = || vec![("x", as_matrix(x)), ("y", as_matrix(y))];
    let outcome = match mode {
        TrigMode::Verify => {
            let mut acc: Option<TrialOutcome> = None;
            for r in &residuals {
                let Some(res) = r.residual else { continue };
                let o = TrialOutcome::from_residual(
                    tag,
                    &format!("({})", r.item),
                    res,
                    r.scale,
                    RESIDUAL_TOL,
                    tol,
                    || (inputs(), as_matrix(x)),
                );
                acc = Some(match acc {
                    Some(a) => a.merge(o),
                    None => o,
                });
            }
            let mut o = acc.expect("unconditional items always run");
            if residuals.iter().any(|r| r.residual.is_none()) {
                o.notes
                    .push("noncommuting pair: addition formulas skipped".into());
            }
            o
        }
        TrigMode::Falsify => {
            let r = residuals
                .iter()
                .find(|r| r.item == "iv")
                .and_then(|r| r.residual)
                .unwrap_or(0.0);
            let hit = r > FALSIFY_THRESHOLD;
            let witness = hit.then(|| super::report::Witness {
                check_id: tag.check_id.to_string(),
                trial: tag.trial,
                substream_seed: tag.substream_seed,
                label: super::report::ADDITION_LABEL.into(),
                inputs: inputs()
                    .into_iter()
                    .map(|(k, m)| (k.to_string(), m))
                    .collect(),
                tested: as_matrix(&cos_gap),
                report: None,
                residual: Some(r),
            });
            TrialOutcome {
                margin: -r,
                failed: hit,
                witness,
                notes: Vec::new(),
            }
        }
    };
    Ok((outcome, residuals))
}

/// Residuals of the seven trigonometric identities. In verify mode each must
/// be at most `1e-10·max(1, scale)`.
pub fn check_trig_identities(
    x: &Element,
    y: &Element,
    tol: f64,
    mode: TrigMode,
) -> Result<TrigResult> {
    let (outcome, residuals) = trig_outcome(instance(TRIG_IDENTITIES), x, y, tol, mode)?;
    let kind = match mode {
        TrigMode::Verify => CheckKind::Verification,
        TrigMode::Falsify => CheckKind::Search,
    };
    Ok(TrigResult {
        report: single(TRIG_IDENTITIES, kind, tol, outcome),
        residuals,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PreserverOptions {
    pub nesting: Nesting,
    /// Also evaluate the series with `a_0·E_n` as constant term.
    pub entrywise_constant: bool,
}

pub(crate) fn preserver_outcome(
    tag: TrialTag<'_>,
    f: &SeriesSpec,
    m: &AMatrix,
    tol: f64,
    opts: PreserverOptions,
) -> Result<TrialOutcome> {
    require_commutative(m.shape())?;
    if let Some(q) = f.first_non_positive(tol)? {
        return Err(Error::Hypothesis(format!(
            "series coefficient {q} is not positive"
        )));
    }
    require_positive("M", m, tol)?;
    let mut constants = vec![(ConstantTerm::Identity, "f(M)")];
    if opts.entrywise_constant {
        constants.push((ConstantTerm::Ones, "f(M) with E_n constant"));
    }
    let mut verdicts = Vec::new();
    for (constant, label) in constants {
        let value = schur_series_apply(
            f,
            m,
            SeriesOptions {
                constant,
                nesting: opts.nesting,
            },
        )?;
        verdicts.push(Verdict::new(label, value, tol)?);
    }
    let coeffs = AMatrix::from_fn(m.shape(), f.coefficients().len(), |j, k| {
        if j == k {
            f.coefficients()[j].clone()
        } else {
            Element::zero(m.shape())
        }
    });
    Ok(TrialOutcome::from_verdicts(
        tag,
        &[("M", m), ("diag(a)", &coeffs)],
        verdicts,
        None,
    ))
}

/// Positivity of `Σ a_q (M°)^q` for positive coefficients and positive `M`
/// over a commutative shape.
pub fn check_preserver(
    f: &SeriesSpec,
    m: &AMatrix,
    tol: f64,
    opts: PreserverOptions,
) -> Result<CheckReport> {
    let outcome = preserver_outcome(instance(SERIES_PRESERVER), f, m, tol, opts)?;
    Ok(single(
        SERIES_PRESERVER,
        CheckKind::Verification,
        tol,
        outcome,
    ))
}

/// `M = U diag(λ) U*`, `N = V diag(μ) V*` with every entry of `U`, `V` and all
/// `λ_j`, `μ_k` drawn from one commuting family with positive `λ`, `μ`.
pub fn commuting_spectral_pair(gen: &mut Generator) -> (AMatrix, AMatrix) {
    let shape = gen.config().shape.clone();
    let n = gen.config().n;
    let frame = gen.commuting_frame();
    let points = frame.points();
    let draw = |gen: &mut Generator| {
        let unitaries: Vec<_> = (0..points).map(|_| gen.random_unitary(n)).collect();
        let u = AMatrix::from_fn(&shape, n, |j, k| {
            frame.embed(&unitaries.iter().map(|w| w[(j, k)]).collect::<Vec<_>>())
        });
        let lambda: Vec<Element> = (0..n)
            .map(|_| frame.embed(&gen.joint_spectrum(points, Spectrum::Positive)))
            .collect();
        let d = AMatrix::diag_matrix(&AVector::new(lambda).expect("n ≥ 1"));
        let m = &(&u * &d) * &u.adjoint();
        m.checked_add(&m.adjoint())
            .expect("same shape")
            .scale_real(0.5)
    };
    let m = draw(gen);
    let nn = draw(gen);
    (m, nn)
}

pub(crate) fn commuting_spectral_outcome(
    tag: TrialTag<'_>,
    m: &AMatrix,
    n: &AMatrix,
    tol: f64,
) -> Result<TrialOutcome> {
    let verdicts = vec![
        Verdict::new("M", m.clone(), tol)?,
        Verdict::new("N", n.clone(), tol)?,
        Verdict::new("M∘N", m.schur_product(n)?, tol)?,
    ];
    Ok(TrialOutcome::from_verdicts(
        tag,
        &[("M", m), ("N", n)],
        verdicts,
        None,
    ))
}
