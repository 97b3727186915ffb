use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::poly::CoeffPoly;
use super::symbols::{Symbol, SymbolTable};
use super::RingError;

/// Unreduced quotient of two polynomials.
///
/// No cancellation is ever attempted; equality is decided by
/// cross-multiplication and [`CoeffFraction::to_poly`] succeeds only when the
/// denominator divides the numerator exactly.
#[derive(Clone)]
pub struct CoeffFraction {
    num: CoeffPoly,
    den: CoeffPoly,
}

impl CoeffFraction {
    pub fn new(num: CoeffPoly, den: CoeffPoly) -> Result<CoeffFraction, RingError> {
        num.check_table(&den)?;
        if den.is_zero() {
            return Err(RingError::DivisionByZero);
        }
        Ok(CoeffFraction { num, den })
    }

    pub fn from_poly(p: CoeffPoly) -> CoeffFraction {
        let den = CoeffPoly::one(p.table());
        CoeffFraction { num: p, den }
    }

    pub fn std(num: &str, den: &str) -> CoeffFraction {
        CoeffFraction::new(CoeffPoly::std(num), CoeffPoly::std(den)).expect("nonzero denominator")
    }

    pub fn num(&self) -> &CoeffPoly {
        &self.num
    }

    pub fn den(&self) -> &CoeffPoly {
        &self.den
    }

    pub fn table(&self) -> &Arc<SymbolTable> {
        self.num.table()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn try_add(&self, o: &CoeffFraction) -> Result<CoeffFraction, RingError> {
        if self.den == o.den {
            return CoeffFraction::new(self.num.try_add(&o.num)?, self.den.clone());
        }
        let num = self.num.try_mul(&o.den)?.try_add(&o.num.try_mul(&self.den)?)?;
        CoeffFraction::new(num, self.den.try_mul(&o.den)?)
    }

    pub fn try_sub(&self, o: &CoeffFraction) -> Result<CoeffFraction, RingError> {
        self.try_add(&-o)
    }

    pub fn try_mul(&self, o: &CoeffFraction) -> Result<CoeffFraction, RingError> {
        CoeffFraction::new(self.num.try_mul(&o.num)?, self.den.try_mul(&o.den)?)
    }

    pub fn try_div(&self, o: &CoeffFraction) -> Result<CoeffFraction, RingError> {
        CoeffFraction::new(self.num.try_mul(&o.den)?, self.den.try_mul(&o.num)?)
    }

    pub fn recip(&self) -> Result<CoeffFraction, RingError> {
        CoeffFraction::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, k: i32) -> Result<CoeffFraction, RingError> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let k = k.abs();
        CoeffFraction::new(base.num.pow(k)?, base.den.pow(k)?)
    }

    /// Exact quotient, if the denominator divides the numerator.
    pub fn to_poly(&self) -> Result<CoeffPoly, RingError> {
        self.num.exact_divide(&self.den)
    }

    pub fn specialize(&self, assignments: &[(Symbol, CoeffPoly)]) -> Result<CoeffFraction, RingError> {
        CoeffFraction::new(self.num.specialize(assignments)?, self.den.specialize(assignments)?)
    }

    /// Cross-multiplied difference `a.num·b.den − b.num·a.den`; zero exactly
    /// when the fractions are equal.
    pub fn cross_residual(&self, o: &CoeffFraction) -> CoeffPoly {
        &self.num * &o.den - &o.num * &self.den
    }

    /// Substitutes rational functions for symbols, clearing denominators
    /// with the least powers that keep every term polynomial in the images.
    pub fn compose(p: &CoeffPoly, images: &[(Symbol, CoeffFraction)]) -> Result<CoeffFraction, RingError> {
        let table = p.table().clone();
        for (_, f) in images {
            p.check_table(&f.num)?;
        }
        let bounds: Vec<(i32, i32)> = images
            .iter()
            .map(|(s, _)| p.degree_range(*s).map_or((0, 0), |(lo, hi)| (lo.min(0), hi.max(0))))
            .collect();
        let mut cache: HashMap<(usize, bool, i32), CoeffPoly> = HashMap::new();
        let mut power = |i: usize, numer: bool, k: i32| -> Result<CoeffPoly, RingError> {
            if let Some(v) = cache.get(&(i, numer, k)) {
                return Ok(v.clone());
            }
            let base = if numer { &images[i].1.num } else { &images[i].1.den };
            let v = base.pow(k)?;
            cache.insert((i, numer, k), v.clone());
            Ok(v)
        };
        let syms: Vec<Symbol> = images.iter().map(|(s, _)| *s).collect();
        let mut num = CoeffPoly::zero(&table);
        for (key, rest) in p.split_by_many(&syms) {
            let mut t = rest;
            for (i, &e) in key.iter().enumerate() {
                let (lo, hi) = bounds[i];
                t = &t * &power(i, true, e - lo)?;
                t = &t * &power(i, false, hi - e)?;
            }
            num += &t;
        }
        let mut den = CoeffPoly::one(&table);
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            den = &den * &power(i, true, -lo)?;
            den = &den * &power(i, false, hi)?;
        }
        CoeffFraction::new(num, den)
    }

    /// Rewrites `self` over a monomial-free denominator when the denominator
    /// is a single term.
    pub fn normalize_monomial_den(&self) -> CoeffFraction {
        match self.den.as_monomial() {
            Some((m, c)) => CoeffFraction::from_poly(self.num.mul_monomial(&m.inv(), &c.recip())),
            None => self.clone(),
        }
    }
}

impl PartialEq for CoeffFraction {
    fn eq(&self, other: &Self) -> bool {
        self.num.check_table(&other.num).is_ok() && self.cross_residual(other).is_zero()
    }
}

impl fmt::Display for CoeffFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for CoeffFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoeffFraction({})", self)
    }
}

impl From<CoeffPoly> for CoeffFraction {
    fn from(p: CoeffPoly) -> Self {
        CoeffFraction::from_poly(p)
    }
}

impl Neg for &CoeffFraction {
    type Output = CoeffFraction;
    fn neg(self) -> CoeffFraction {
        CoeffFraction { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for CoeffFraction {
    type Output = CoeffFraction;
    fn neg(self) -> CoeffFraction {
        -&self
    }
}

macro_rules! frac_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&CoeffFraction> for &CoeffFraction {
            type Output = CoeffFraction;
            fn $method(self, rhs: &CoeffFraction) -> CoeffFraction {
                self.$checked(rhs).expect("fraction arithmetic")
            }
        }
        impl $trait<CoeffFraction> for CoeffFraction {
            type Output = CoeffFraction;
            fn $method(self, rhs: CoeffFraction) -> CoeffFraction {
                (&self).$method(&rhs)
            }
        }
    };
}

frac_binop!(Add, add, try_add);
frac_binop!(Sub, sub, try_sub);
frac_binop!(Mul, mul, try_mul);
