//! Exact rational and commutative Laurent-polynomial arithmetic.
//!
//! Every coefficient in the engine is a [`CoeffPoly`]: a finite sum of
//! rational multiples of Laurent monomials in the symbols of a
//! [`SymbolTable`]. Rational functions are carried as unreduced
//! [`CoeffFraction`]s and compared by cross-multiplication.

mod fraction;
mod parse;
mod poly;
mod subst;
mod symbols;

pub use fraction::CoeffFraction;
pub use poly::{CoeffPoly, Monomial};
pub use subst::MonomialSubstitution;
pub use symbols::{sym, Symbol, SymbolTable, MAX_SYMBOLS, STANDARD_NAMES};

pub(crate) use symbols::same_table;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("operands live in different symbol tables")]
    TableMismatch,
    #[error("symbol table holds {0} names, more than the supported maximum")]
    TableFull(usize),
    #[error("duplicate symbol name `{0}`")]
    DuplicateSymbol(String),
    #[error("invalid symbol name `{0}`")]
    BadSymbolName(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("exact division failed; uncancelled term {witness}")]
    DivisionFailure { witness: String },
    #[error("symbol `{0}` occurs with a negative exponent but is assigned a non-invertible value")]
    NotInvertible(String),
    #[error("malformed substitution: {0}")]
    MalformedMap(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("exponent overflow")]
    ExponentOverflow,
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num/den` form used by the JSON serialisation (denominator always shown).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

pub(crate) fn rational_pow(r: &Rational, e: i32) -> Rational {
    if e == 0 {
        return Rational::one();
    }
    let base = if e < 0 { r.recip() } else { r.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip() {
        let r = rat(-6, 4);
        assert_eq!(format_rational(&r), "-3/2");
        assert_eq!(parse_rational("-3/2"), Some(r));
        assert_eq!(format_rational(&int(5)), "5/1");
        assert_eq!(parse_rational("7"), Some(int(7)));
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn rational_powers() {
        assert_eq!(rational_pow(&rat(2, 3), -2), rat(9, 4));
        assert_eq!(rational_pow(&rat(2, 3), 0), int(1));
    }
}
