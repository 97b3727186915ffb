//! Shared fixtures for the criterion benchmarks.

use pvc_core::{CoeffPoly, Mode, TorusElement};

/// `(G1 + G2 + G3 + Ginf + 1)^k`, a dense symmetric polynomial.
pub fn dense_power(k: i32) -> CoeffPoly {
    CoeffPoly::std("G1 + G2 + G3 + Ginf + 1").pow(k).expect("nonnegative power")
}

/// A product whose exact quotient by `dense_power(k)` is known.
pub fn divisible_pair(k: i32) -> (CoeffPoly, CoeffPoly) {
    let den = dense_power(k);
    let q = CoeffPoly::std("G1*G2 - Ginf^2 + 3*G3");
    (den.try_mul(&q).expect("product"), den)
}

/// A quantum element with a handful of Laurent monomials in X1, X2, X3.
pub fn quantum_element() -> TorusElement {
    let classical = TorusElement::classical("E1*E2*E3 + G1*E1 + G2*E2 + G3*E3 + E1^-1*E2 + 1");
    assert_eq!(classical.mode(), Mode::Classical);
    classical.quantize().expect("quantize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_consistent() {
        let (num, den) = divisible_pair(3);
        assert_eq!(num.exact_divide(&den).unwrap(), CoeffPoly::std("G1*G2 - Ginf^2 + 3*G3"));
        assert_eq!(quantum_element().len(), 6);
    }
}
