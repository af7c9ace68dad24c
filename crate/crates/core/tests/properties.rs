mod common;

use common::{assemble_block, factorization_psd, gen, schur_oracle};
use cstar_schur::{cauchy_schwarz_gap, AMatrix, AVector, Element, Nesting};
use proptest::prelude::*;

const SHAPES: [&[usize]; 6] = [&[1], &[1, 1], &[1, 1, 1, 1], &[2], &[2, 1], &[3]];
const COMMUTATIVE: [&[usize]; 3] = [&[1], &[1, 1], &[1, 1, 1, 1]];

fn close(a: &AMatrix, b: &AMatrix, rel: f64) -> bool {
    a.max_abs_diff(b).unwrap() <= rel * a.norm().max(b.norm()).max(1.0)
}

fn close_el(a: &Element, b: &Element, rel: f64) -> bool {
    a.max_abs_diff(b).unwrap() <= rel * a.norm().max(b.norm()).max(1.0)
}

fn as_matrix(x: &Element) -> AMatrix {
    AMatrix::from_rows(x.shape(), vec![vec![x.clone()]]).unwrap()
}

fn case() -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), 0..SHAPES.len(), 1usize..5)
}

fn commutative_case() -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), 0..COMMUTATIVE.len(), 1usize..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn involution((seed, s, n) in case()) {
        let mut g = gen(seed, SHAPES[s], n, 0);
        let (x, y) = (g.gaussian_element(), g.gaussian_element());
        prop_assert_eq!(x.adjoint().adjoint(), x.clone());
        prop_assert!(close_el(&(&x * &y).adjoint(), &(&y.adjoint() * &x.adjoint()), 1e-14));
        let m = g.gaussian_matrix();
        prop_assert_eq!(m.adjoint().adjoint(), m);
    }

    #[test]
    fn c_star_identity((seed, s, n) in case()) {
        let mut g = gen(seed, SHAPES[s], n, 0);
        let x = g.gaussian_element();
        let lhs = (&x.adjoint() * &x).norm();
        let rhs = x.norm() * x.norm();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn cone_closure((seed, s, n) in case(), c in 0.0f64..10.0) {
        let mut g = gen(seed, SHAPES[s], n, 0);
        let (_, m1) = g.random_positive_matrix();
        let (_, m2) = g.random_positive_matrix();
        prop_assert!((&m1 + &m2).psd_check(1e-9).unwrap().is_positive);
        prop_assert!(m1.scale_real(c).psd_check(1e-9).unwrap().is_positive);
        let b = g.gaussian_matrix();
        let conj = &(&b * &m1) * &b.adjoint();
        prop_assert!(conj.psd_check(1e-9).unwrap().is_positive);
    }

    #[test]
    fn schur_product_algebra((seed, s, n) in case(), alpha in -3.0f64..3.0) {
        let mut g = gen(seed, SHAPES[s], n, 0);
        let (a, b, c) = (g.gaussian_matrix(), g.gaussian_matrix(), g.gaussian_matrix());
        let ab = a.schur_product(&b).unwrap();
        prop_assert_eq!(&ab, &b.schur_product(&a).unwrap());
        prop_assert!(close(&ab, &schur_oracle(&a, &b), 1e-14));
        prop_assert!(close(&ab.adjoint(), &a.adjoint().schur_product(&b.adjoint()).unwrap(), 1e-14));
        let lhs = a.scale_real(alpha).checked_add(&c).unwrap().schur_product(&b).unwrap();
        let rhs = &ab.scale_real(alpha) + &c.schur_product(&b).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn commutative_collapse((seed, s, n) in commutative_case()) {
        let mut g = gen(seed, COMMUTATIVE[s], n, 0);
        let (a, b) = (g.gaussian_matrix(), g.gaussian_matrix());
        let plain = AMatrix::from_fn(a.shape(), n, |j, k| a.get(j, k) * b.get(j, k));
        prop_assert!(close(&a.schur_product(&b).unwrap(), &plain, 1e-15));
        let m = a.clone();
        prop_assert!(close(
            &m.schur_power(3, Nesting::Left),
            &m.schur_power(3, Nesting::Right),
            1e-13
        ));
    }

    #[test]
    fn commutative_schur_positive((seed, s, n) in commutative_case()) {
        let mut g = gen(seed, COMMUTATIVE[s], n, 0);
        let (_, m) = g.random_positive_matrix();
        let (_, nn) = g.random_positive_matrix();
        let p = m.schur_product(&nn).unwrap();
        prop_assert!(p.psd_check(1e-9).unwrap().is_positive);
        prop_assert!(factorization_psd(&p, 1e-9));
    }

    #[test]
    fn flatten_roundtrip((seed, s, n) in case()) {
        let mut g = gen(seed, SHAPES[s], n, 0);
        let m = g.gaussian_matrix();
        let flat = m.flatten();
        for (b, f) in flat.iter().enumerate() {
            prop_assert_eq!(f, &assemble_block(&m, b));
        }
        prop_assert_eq!(AMatrix::unflatten(flat, m.shape(), n).unwrap(), m);
    }

    #[test]
    fn inner_product_laws((seed, s, n) in case()) {
        let mut g = gen(seed, SHAPES[s], n, 0);
        let (x, y, z) = (g.gaussian_vector(), g.gaussian_vector(), g.gaussian_vector());
        let a = g.gaussian_element();
        let xy = x.inner_product(&y).unwrap();
        prop_assert!(close_el(&xy.adjoint(), &y.inner_product(&x).unwrap(), 1e-13));
        let ax = x.left_mul(&a).unwrap();
        prop_assert!(close_el(&ax.inner_product(&y).unwrap(), &(&a * &xy), 1e-12));
        let sum = x.checked_add(&z).unwrap().inner_product(&y).unwrap();
        prop_assert!(close_el(&sum, &(&xy + &z.inner_product(&y).unwrap()), 1e-12));
        prop_assert!(as_matrix(&x.inner_product(&x).unwrap()).psd_check(1e-9).unwrap().is_positive);
    }

    #[test]
    fn cauchy_schwarz((seed, s, n) in case()) {
        let mut g = gen(seed, SHAPES[s], n, 0);
        let (x, y) = (g.gaussian_vector(), g.gaussian_vector());
        let gap = cauchy_schwarz_gap(&x, &y).unwrap();
        prop_assert!(gap.classify(1e-9).unwrap().is_positive);
        let ones = AVector::ones(x.shape(), n);
        prop_assert!(cauchy_schwarz_gap(&ones, &ones).unwrap().norm() <= 1e-12);
    }

    #[test]
    fn square_root((seed, s, n) in case()) {
        let mut g = gen(seed, SHAPES[s], n, 0);
        let p = g.positive_element();
        let r = p.sqrt(1e-9).unwrap();
        prop_assert!(r.classify(1e-9).unwrap().is_positive);
        prop_assert!(close_el(&(&r * &r), &p, 1e-10));
        let mut m = g.gaussian_matrix();
        m = &m * &m.adjoint();
        let root = m.positive_sqrt(1e-9).unwrap();
        prop_assert!(close(&(&root * &root), &m, 1e-9));
    }

    #[test]
    fn psd_check_agrees_with_factorization((seed, s, n) in case(), sign in prop::bool::ANY) {
        let mut g = gen(seed, SHAPES[s], n, 0);
        let shape = common::shape(SHAPES[s]);
        let shift = if sign { 0.05 } else { -0.05 };
        let h = common::hermitian_with_spectrum(&mut g, &shape, n, |_, r| {
            if r == 0 { shift } else { 1.0 + r as f64 }
        });
        let report = h.psd_check(1e-9).unwrap();
        prop_assert_eq!(report.is_positive, sign);
        prop_assert_eq!(factorization_psd(&h, 1e-9), sign);
    }
}
