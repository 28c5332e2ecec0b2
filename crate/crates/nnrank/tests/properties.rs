//! Randomized invariants over the exact arithmetic and the gadget
//! constructions.

use proptest::prelude::*;

use nnrank::gadgets::{build_b, factor_b_equal};
use nnrank::matrix::{format_matrix, parse_matrix, ExactMatrix};
use nnrank::poly::{det_symbolic, MultiPoly};
use nnrank::scalar::{
    div, quad, rat, scalar_format, scalar_parse, ExactScalar, ScalarDomain,
};

fn arb_rat() -> impl Strategy<Value = ExactScalar> {
    (-50i64..=50, 1i64..=20).prop_map(|(n, d)| rat(n, d))
}

fn arb_quad() -> impl Strategy<Value = ExactScalar> {
    (-20i64..=20, 1i64..=10, -20i64..=20, 1i64..=10)
        .prop_map(|(pn, pd, qn, qd)| quad(pn, pd, qn, qd))
}

fn arb_scalar() -> impl Strategy<Value = ExactScalar> {
    prop_oneof![arb_rat(), arb_quad()]
}

proptest! {
    #[test]
    fn field_axioms(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a - &a, ExactScalar::zero(a.domain()));
        if !a.is_zero() {
            let inv = a.inv().unwrap();
            prop_assert!((&a * &inv - ExactScalar::one(a.domain())).is_zero());
            prop_assert_eq!(div(&b, &a).unwrap(), &b * &inv);
        }
    }

    #[test]
    fn scalar_parse_format_round_trip(x in arb_scalar()) {
        let text = scalar_format(&x);
        let back = scalar_parse(&text, x.domain()).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn sign_matches_float(x in arb_quad()) {
        let f = x.to_f64();
        if f.abs() > 1e-6 {
            prop_assert_eq!(x.sign(), if f > 0.0 { 1 } else { -1 });
        }
    }

    #[test]
    fn matrix_round_trip_and_rank_transpose(
        entries in prop::collection::vec(arb_scalar(), 12..=12)
    ) {
        let domain = if entries.iter().any(|e| e.domain() == ScalarDomain::Quad) {
            ScalarDomain::Quad
        } else {
            ScalarDomain::Rat
        };
        let m = ExactMatrix::new(3, 4, domain, entries).unwrap();
        let back = parse_matrix(&format_matrix(&m)).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(m.rank_exact(), m.transpose().rank_exact());
    }

    #[test]
    fn symbolic_det_matches_exact_det(cells in prop::collection::vec(-9i64..=9, 16..=16)) {
        let grid: Vec<Vec<MultiPoly>> = (0..4)
            .map(|i| (0..4).map(|j| MultiPoly::from_int(cells[4 * i + j])).collect())
            .collect();
        let symbolic = det_symbolic(&grid)
            .eval(&[rat(0, 1), rat(0, 1), rat(0, 1), rat(0, 1)], ScalarDomain::Rat)
            .unwrap();
        let rows: Vec<Vec<ExactScalar>> = (0..4)
            .map(|i| (0..4).map(|j| rat(cells[4 * i + j], 1)).collect())
            .collect();
        let m = ExactMatrix::from_rows(ScalarDomain::Rat, rows).unwrap();
        prop_assert_eq!(m.det().unwrap(), symbolic);
    }

    #[test]
    fn gadget_factorization_always_validates(num in 0i64..=24, den in 1i64..=24, n in 1usize..=5) {
        let alpha = rat(num.min(den), den);
        let b = build_b(&vec![alpha.clone(); n]).unwrap();
        let f = factor_b_equal(&alpha, n).unwrap();
        prop_assert!(b.validate_factorization(&f).unwrap().pass());
    }

    #[test]
    fn gadget_rank_dichotomy(nums in prop::collection::vec(0i64..=40, 2..=4), den in 20i64..=40) {
        let alphas: Vec<ExactScalar> = nums.iter().map(|&x| rat(x, den)).collect();
        let all_equal = alphas.iter().all(|a| *a == alphas[0]);
        let rank = build_b(&alphas).unwrap().rank_exact();
        prop_assert_eq!(rank == 4, all_equal);
    }
}
