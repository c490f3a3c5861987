use laguerre2d::bipoly::{rational, BiPoly};
use laguerre2d::construct2d::{squared_norm, z_eval_1f1, z_eval_radial, z_poly_in};
use laguerre2d::hypergeom::{laguerre, laguerre_by_recurrence};
use laguerre2d::quaternion::{from_matrix, polar_factorize, sandwich_eval, to_matrix};
use laguerre2d::{Quaternion, ZIndex};
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;

type P = BiPoly<BigRational>;

fn poly() -> impl Strategy<Value = P> {
    prop::collection::vec((0i32..4, 0i32..4, -5i64..6, 1i64..4), 0..6)
        .prop_map(|t| P::from_terms(t.into_iter().map(|(a, b, p, q)| (a, b, rational(p, q)))))
}

fn small_complex() -> impl Strategy<Value = Complex64> {
    (-1.5f64..1.5, -1.5f64..1.5).prop_map(|(re, im)| Complex64::new(re, im))
}

fn quaternion() -> impl Strategy<Value = Quaternion> {
    (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b, c, d)| Quaternion::new(a, b, c, d))
}

proptest! {
    #[test]
    fn ring_laws(p in poly(), q in poly(), r in poly()) {
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert!((&p - &p).is_zero());
        prop_assert_eq!(&p * &P::one(), p.clone());
    }

    #[test]
    fn conjugation_is_an_involutive_automorphism(p in poly(), q in poly()) {
        prop_assert_eq!((&p * &q).conjugate(), &p.conjugate() * &q.conjugate());
        prop_assert_eq!((&p + &q).conjugate(), &p.conjugate() + &q.conjugate());
        prop_assert_eq!(p.conjugate().conjugate(), p);
    }

    #[test]
    fn derivatives_commute_and_obey_leibniz(p in poly(), q in poly()) {
        prop_assert_eq!(p.d_dw().d_dwbar(), p.d_dwbar().d_dw());
        prop_assert_eq!((&p * &q).d_dw(), &(&p.d_dw() * &q) + &(&p * &q.d_dw()));
        prop_assert_eq!(p.conjugate().d_dw(), p.d_dwbar().conjugate());
    }

    #[test]
    fn evaluation_is_a_homomorphism(p in poly(), q in poly(), z in small_complex()) {
        let (pf, qf) = (p.to_f64(), q.to_f64());
        let prod = (&pf * &qf).eval_complex(z).unwrap();
        let split = pf.eval_complex(z).unwrap() * qf.eval_complex(z).unwrap();
        prop_assert!((prod - split).norm() <= 1e-10 * (1.0 + prod.norm()));
        let conj = pf.conjugate().eval_complex(z).unwrap();
        prop_assert!((conj - pf.eval_complex(z).unwrap().conj()).norm() <= 1e-12 * (1.0 + conj.norm()));
    }

    #[test]
    fn z_conjugate_symmetry(m in 0usize..9, n in 0usize..9, b in 0i64..6) {
        let beta = rational(b, 2);
        prop_assert_eq!(z_poly_in(n, m, &beta), z_poly_in(m, n, &beta).conjugate());
    }

    #[test]
    fn z_evaluators_agree(m in 0usize..10, n in 0usize..10, beta in 0.0f64..3.0, z in small_complex()) {
        let idx = ZIndex::new(m, n, beta).unwrap();
        let a = z_eval_1f1(idx, z);
        let b = z_eval_radial(idx, z);
        prop_assert!((a - b).norm() <= 1e-11 * (1.0 + a.norm()));
        prop_assert!(squared_norm(m, n, beta) > 0.0);
    }

    #[test]
    fn laguerre_paths_agree(n in 0usize..20, a in 0.0f64..5.0, x in 0.0f64..6.0) {
        let exact = laguerre(n, a, x).unwrap();
        let rec = laguerre_by_recurrence(n, a, x);
        prop_assert!((exact - rec).abs() <= 1e-11 * (1.0 + exact.abs()));
    }

    #[test]
    fn quaternion_norm_is_multiplicative(p in quaternion(), q in quaternion()) {
        let lhs = (p * q).norm();
        prop_assert!((lhs - p.norm() * q.norm()).abs() <= 1e-13 * (1.0 + lhs));
        let m = to_matrix(p * q);
        let prod = to_matrix(p) * to_matrix(q);
        prop_assert!(m.max_abs_diff(&prod) <= 1e-13 * (1.0 + lhs));
        prop_assert!(from_matrix(&m).unwrap().max_abs_diff(p * q) <= 1e-13 * (1.0 + lhs));
    }

    #[test]
    fn polar_factorization_reconstructs(q in quaternion()) {
        let pf = polar_factorize(q);
        prop_assert!(pf.reconstruct().max_abs_diff(&to_matrix(q)) <= 1e-12 * (1.0 + q.norm()));
        prop_assert!((pf.zslice.norm() - q.norm()).abs() <= 1e-12 * (1.0 + q.norm()));
    }

    #[test]
    fn real_quaternions_reduce_to_the_complex_case(x in -1.5f64..1.5, m in 0usize..6, n in 0usize..6) {
        let idx = ZIndex::new(m, n, 0.5).unwrap();
        let q = sandwich_eval(idx, Quaternion::real(x));
        let z = z_eval_1f1(idx, Complex64::new(x, 0.0));
        prop_assert!((q.x0 - z.re).abs() <= 1e-12 * (1.0 + z.norm()));
        prop_assert!(q.vector_norm() <= 1e-12 * (1.0 + z.norm()));
    }
}
