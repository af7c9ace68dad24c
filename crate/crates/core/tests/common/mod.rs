#![allow(dead_code)]

//! Independent oracles. Nothing here calls the eigen-based positivity code.

use cstar_schur::{AMatrix, AlgebraShape, CMatrix, Element, GenConfig, Generator};
use num_complex::Complex64;

/// The block-`b` matrix of `M_n(A) ≅ ⊕ M_{n·k_b}`, assembled entry by entry.
pub fn assemble_block(m: &AMatrix, b: usize) -> CMatrix {
    let k = m.shape().blocks()[b];
    let n = m.n();
    CMatrix::from_fn(n * k, n * k, |r, c| {
        m.get(r / k, c / k).block(b)[(r % k, c % k)]
    })
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Pivoted Cholesky on `H + τI`. Succeeds iff every pivot stays positive.
pub fn cholesky_psd(h: &CMatrix, shift: f64) -> bool {
    let n = h.nrows();
    let mut a = h.clone();
    for i in 0..n {
        a[(i, i)] += Complex64::new(shift, 0.0);
    }
    for step in 0..n {
        let p = (step..n)
            .max_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re))
            .unwrap_or(step);
        a.swap_rows(step, p);
        a.swap_columns(step, p);
        let pivot = a[(step, step)].re;
        if !(pivot > 0.0) {
            return false;
        }
        let l = pivot.sqrt();
        for i in step + 1..n {
            a[(i, step)] /= l;
        }
        for j in step + 1..n {
            for i in j..n {
                let update = a[(i, step)] * a[(j, step)].conj();
                a[(i, j)] -= update;
                a[(j, i)] = a[(i, j)].conj();
            }
        }
    }
    true
}

/// Positivity of a self-adjoint matrix over the algebra by factorization
/// attempts with shift `tol·max(1, ‖M‖_F)`.
pub fn factorization_psd(m: &AMatrix, tol: f64) -> bool {
    let blocks: Vec<CMatrix> = (0..m.shape().num_blocks())
        .map(|b| assemble_block(m, b))
        .collect();
    let scale = blocks.iter().map(frobenius).fold(0.0, f64::max);
    let shift = tol * scale.max(1.0);
    blocks.iter().all(|h| cholesky_psd(h, shift))
}

/// Eigenvalues of a Hermitian `[[a, b], [b̄, d]]`, ascending.
pub fn eig2(a: f64, b: Complex64, d: f64) -> (f64, f64) {
    let mid = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    (mid - rad, mid + rad)
}

/// `½(ab + ba)` entry by entry on raw blocks.
pub fn schur_oracle(m: &AMatrix, n: &AMatrix) -> AMatrix {
    let shape = m.shape().clone();
    AMatrix::from_fn(&shape, m.n(), |j, k| {
        let blocks = m
            .get(j, k)
            .blocks()
            .iter()
            .zip(n.get(j, k).blocks())
            .map(|(a, b)| (a * b + b * a) * Complex64::new(0.5, 0.0))
            .collect();
        Element::from_blocks(shape.clone(), blocks).unwrap()
    })
}

/// `∏_l (1 + cos(x_{jl} − x_{kl}))/2 − 1/n` for scalar points.
pub fn novak_scalar(x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = x.len();
    (0..n)
        .map(|j| {
            (0..n)
                .map(|k| {
                    x[j].iter()
                        .zip(&x[k])
                        .map(|(a, b)| 0.5 * (1.0 + (a - b).cos()))
                        .product::<f64>()
                        - 1.0 / n as f64
                })
                .collect()
        })
        .collect()
}

/// A Hermitian matrix over `shape` whose flattened blocks have prescribed
/// eigenvalues, conjugated by random unitaries.
pub fn hermitian_with_spectrum(
    gen: &mut Generator,
    shape: &AlgebraShape,
    n: usize,
    eigen: impl Fn(usize, usize) -> f64,
) -> AMatrix {
    let blocks: Vec<CMatrix> = shape
        .blocks()
        .iter()
        .enumerate()
        .map(|(b, &k)| {
            let size = n * k;
            let u = gen.random_unitary(size);
            let d = CMatrix::from_fn(size, size, |r, c| {
                if r == c {
                    Complex64::new(eigen(b, r), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            let h = &u * d * u.adjoint();
            (&h + h.adjoint()) * Complex64::new(0.5, 0.0)
        })
        .collect();
    AMatrix::unflatten(blocks, shape, n).unwrap()
}

pub fn shape(blocks: &[usize]) -> AlgebraShape {
    AlgebraShape::new(blocks.to_vec()).unwrap()
}

pub fn gen(seed: u64, blocks: &[usize], n: usize, trial: u64) -> Generator {
    Generator::for_trial(&GenConfig::new(seed, shape(blocks), n), trial)
}
