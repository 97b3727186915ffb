use std::sync::Arc;

use proptest::prelude::*;
use pvc_core::coeffring::rat;
use pvc_core::qtorus::{chi, ExchangeData};
use pvc_core::{sym, CoeffPoly, Mode, SymbolTable, TorusElement};

fn table() -> Arc<SymbolTable> {
    SymbolTable::standard()
}

fn element(mode: Mode) -> impl Strategy<Value = TorusElement> {
    let term = (prop::array::uniform3(-2i32..=2), -4i64..=4, 1i64..=3, -1i32..=1, 0i32..=1);
    prop::collection::vec(term, 0..4).prop_map(move |ts| {
        ts.into_iter().fold(TorusElement::zero(mode, &table()), |acc, (e, n, d, q, g)| {
            let mut c = CoeffPoly::constant(&table(), rat(n, d));
            if mode == Mode::Quantum {
                c = &c * &CoeffPoly::var_pow(&table(), sym::QH, q);
            }
            c = &c * &CoeffPoly::var_pow(&table(), sym::G_1, g);
            &acc + &TorusElement::monomial(mode, e, c)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn quantum_product_is_associative(a in element(Mode::Quantum), b in element(Mode::Quantum), c in element(Mode::Quantum)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn quantum_product_distributes(a in element(Mode::Quantum), b in element(Mode::Quantum), c in element(Mode::Quantum)) {
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&b + &c) * &a, &(&b * &a) + &(&c * &a));
    }

    #[test]
    fn conjugation_is_an_anti_involution(a in element(Mode::Quantum), b in element(Mode::Quantum)) {
        prop_assert_eq!(a.hermitian_conjugate().hermitian_conjugate(), a.clone());
        prop_assert_eq!((&a * &b).hermitian_conjugate(), &b.hermitian_conjugate() * &a.hermitian_conjugate());
    }

    #[test]
    fn weyl_quantization_has_the_right_classical_limit(a in element(Mode::Classical), b in element(Mode::Classical)) {
        let qa = a.quantize().unwrap();
        prop_assert_eq!(qa.classical_limit().unwrap(), a.clone());
        prop_assert_eq!(qa.hermitian_conjugate(), qa);
        let prod = (&a.quantize().unwrap() * &b.quantize().unwrap()).classical_limit().unwrap();
        prop_assert_eq!(prod, &a * &b);
    }

    #[test]
    fn poisson_bracket_is_antisymmetric_and_leibniz(a in element(Mode::Classical), b in element(Mode::Classical), c in element(Mode::Classical)) {
        let ab = a.poisson(&b).unwrap();
        prop_assert_eq!(&ab + &b.poisson(&a).unwrap(), TorusElement::zero(Mode::Classical, &table()));
        let lhs = a.poisson(&(&b * &c)).unwrap();
        let rhs = &(&a.poisson(&b).unwrap() * &c) + &(&b * &a.poisson(&c).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn poisson_bracket_satisfies_jacobi(a in element(Mode::Classical), b in element(Mode::Classical), c in element(Mode::Classical)) {
        let j = &(&a.poisson(&b.poisson(&c).unwrap()).unwrap() + &b.poisson(&c.poisson(&a).unwrap()).unwrap())
            + &c.poisson(&a.poisson(&b).unwrap()).unwrap();
        prop_assert!(j.is_zero());
    }

    #[test]
    fn generators_q_commute(a in prop::array::uniform3(-3i32..=3), b in prop::array::uniform3(-3i32..=3)) {
        let one = CoeffPoly::one(&table());
        let ea = TorusElement::monomial(Mode::Quantum, a, one.clone());
        let eb = TorusElement::monomial(Mode::Quantum, b, one.clone());
        prop_assert_eq!(chi(a, b) - chi(b, a), -ExchangeData::pairing(a, b));
        let phase = CoeffPoly::var_pow(&table(), sym::QH, -2 * ExchangeData::pairing(a, b));
        prop_assert_eq!(&ea * &eb, (&eb * &ea).scale(&phase));
    }
}
