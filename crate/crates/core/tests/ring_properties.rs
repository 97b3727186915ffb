use std::sync::Arc;

use proptest::prelude::*;
use pvc_core::coeffring::{rat, MonomialSubstitution};
use pvc_core::{sym, CoeffFraction, CoeffPoly, Monomial, Symbol, SymbolTable};

const VARS: [Symbol; 3] = [sym::X1, sym::X2, sym::G_1];

fn table() -> Arc<SymbolTable> {
    SymbolTable::standard()
}

fn term() -> impl Strategy<Value = (Monomial, pvc_core::Rational)> {
    (prop::array::uniform3(-2i32..=3), -6i64..=6, 1i64..=4).prop_map(|(e, n, d)| {
        let m = VARS.iter().zip(e).fold(Monomial::ONE, |m, (&s, k)| m.with_exponent(s, k));
        (m, rat(n, d))
    })
}

fn poly() -> impl Strategy<Value = CoeffPoly> {
    prop::collection::vec(term(), 0..5).prop_map(|ts| CoeffPoly::from_terms(&table(), ts))
}

fn nonzero_poly() -> impl Strategy<Value = CoeffPoly> {
    poly().prop_filter("nonzero", |p| !p.is_zero())
}

fn point() -> impl Strategy<Value = Vec<(Symbol, CoeffPoly)>> {
    prop::array::uniform3((1i64..=9, 1i64..=5, any::<bool>())).prop_map(|vals| {
        VARS.iter()
            .zip(vals)
            .map(|(&s, (n, d, neg))| (s, CoeffPoly::constant(&table(), rat(if neg { -n } else { n }, d))))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn addition_is_a_commutative_group(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &CoeffPoly::zero(&table()), a.clone());
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(-&(-&a), a);
    }

    #[test]
    fn multiplication_is_commutative_and_unital(a in poly(), b in poly()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &CoeffPoly::one(&table()), a.clone());
        prop_assert!((&a * &CoeffPoly::zero(&table())).is_zero());
    }

    #[test]
    fn multiplication_is_associative(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn multiplication_distributes(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn exact_division_inverts_multiplication(a in poly(), b in nonzero_poly()) {
        prop_assert_eq!((&a * &b).exact_divide(&b).unwrap(), a);
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(a in poly(), b in poly(), pt in point()) {
        let ev = |p: &CoeffPoly| p.specialize(&pt).unwrap();
        prop_assert_eq!(ev(&(&a * &b)), &ev(&a) * &ev(&b));
        prop_assert_eq!(ev(&(&a + &b)), &ev(&a) + &ev(&b));
        prop_assert!(ev(&a).as_constant().is_some());
    }

    #[test]
    fn monomial_substitution_is_a_ring_homomorphism(a in poly(), b in poly(), k in -2i32..=2, c in 1i64..=3) {
        let map = MonomialSubstitution::from_polys(&table(), &[
            (sym::X1, CoeffPoly::std(&format!("{c}*x2^{k}*g1"))),
            (sym::G_1, CoeffPoly::std("g1^-1")),
        ]).unwrap();
        let f = |p: &CoeffPoly| map.apply(p).unwrap();
        prop_assert_eq!(f(&(&a * &b)), &f(&a) * &f(&b));
        prop_assert_eq!(f(&(&a + &b)), &f(&a) + &f(&b));
    }

    #[test]
    fn display_and_json_round_trip(a in poly()) {
        prop_assert_eq!(CoeffPoly::std(&a.to_string()), a.clone());
        prop_assert_eq!(CoeffPoly::from_json(&table(), &a.to_json()).unwrap(), a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn fractions_add_and_cancel(a in poly(), b in nonzero_poly(), c in poly(), d in nonzero_poly()) {
        let x = CoeffFraction::new(a.clone(), b.clone()).unwrap();
        let y = CoeffFraction::new(c.clone(), d.clone()).unwrap();
        let sum = x.try_add(&y).unwrap();
        let want = CoeffFraction::new(&(&a * &d) + &(&c * &b), &b * &d).unwrap();
        prop_assert!(sum.cross_residual(&want).is_zero());
        prop_assert!(x.try_sub(&x).unwrap().is_zero());
    }
}

#[test]
fn failed_division_names_a_witness() {
    let err = CoeffPoly::std("x1^2 + 1").exact_divide(&CoeffPoly::std("x1 + 1")).unwrap_err();
    assert!(matches!(err, pvc_core::RingError::DivisionFailure { .. }));
}
