use std::sync::Arc;

use num_traits::{One, Zero};

use super::poly::{CoeffPoly, Monomial};
use super::symbols::{same_table, Symbol, SymbolTable, MAX_SYMBOLS};
use super::{rational_pow, Rational, RingError};

/// Sends selected symbols to `coefficient × monomial`; every other symbol is
/// fixed. Confluence rescalings such as `E3 ↦ eps⁻¹·E3` are of this kind.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MonomialSubstitution {
    table: Arc<SymbolTable>,
    images: Vec<Option<(Rational, Monomial)>>,
}

impl MonomialSubstitution {
    pub fn identity(table: &Arc<SymbolTable>) -> MonomialSubstitution {
        MonomialSubstitution { table: table.clone(), images: vec![None; MAX_SYMBOLS] }
    }

    pub fn table(&self) -> &Arc<SymbolTable> {
        &self.table
    }

    pub fn set(mut self, s: Symbol, coeff: Rational, image: Monomial) -> Result<Self, RingError> {
        if coeff.is_zero() {
            return Err(RingError::MalformedMap(format!(
                "zero coefficient for `{}`",
                self.table.name(s)
            )));
        }
        self.images[s.index()] = Some((coeff, image));
        Ok(self)
    }

    /// Builds the map from single-term polynomial images.
    pub fn from_polys(
        table: &Arc<SymbolTable>,
        images: &[(Symbol, CoeffPoly)],
    ) -> Result<MonomialSubstitution, RingError> {
        let mut out = MonomialSubstitution::identity(table);
        for (s, p) in images {
            if !same_table(table, p.table()) {
                return Err(RingError::TableMismatch);
            }
            let (m, c) = p.as_monomial().ok_or_else(|| {
                RingError::MalformedMap(format!("image of `{}` is not a monomial: {p}", table.name(*s)))
            })?;
            out = out.set(*s, c, m)?;
        }
        Ok(out)
    }

    pub fn image(&self, s: Symbol) -> Option<&(Rational, Monomial)> {
        self.images[s.index()].as_ref()
    }

    pub fn is_identity(&self) -> bool {
        self.table.symbols().all(|s| match &self.images[s.index()] {
            None => true,
            Some((c, m)) => c.is_one() && *m == Monomial::var(s),
        })
    }

    pub fn apply(&self, p: &CoeffPoly) -> Result<CoeffPoly, RingError> {
        if !same_table(&self.table, p.table()) {
            return Err(RingError::TableMismatch);
        }
        let terms = p.terms().iter().map(|(m, c)| {
            let mut coeff = c.clone();
            let mut out = Monomial::ONE;
            for (s, e) in m.support() {
                match &self.images[s.index()] {
                    None => out = out.mul(&Monomial::var_pow(s, e)),
                    Some((ic, im)) => {
                        coeff *= rational_pow(ic, e);
                        out = out.mul(&im.pow(e));
                    }
                }
            }
            (out, coeff)
        });
        Ok(CoeffPoly::from_terms(p.table(), terms))
    }

    /// `self` followed by `next`: the image of `s` is `next(self(s))`.
    pub fn then(&self, next: &MonomialSubstitution) -> Result<MonomialSubstitution, RingError> {
        let mut out = MonomialSubstitution::identity(&self.table);
        for s in self.table.symbols() {
            let current = match &self.images[s.index()] {
                None => CoeffPoly::var(&self.table, s),
                Some((c, m)) => CoeffPoly::term(&self.table, *m, c.clone()),
            };
            let (m, c) = next.apply(&current)?.as_monomial().expect("monomial image");
            out.images[s.index()] = Some((c, m));
        }
        Ok(out)
    }
}

impl CoeffPoly {
    pub fn substitute(&self, map: &MonomialSubstitution) -> Result<CoeffPoly, RingError> {
        map.apply(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::{int, sym};

    #[test]
    fn confluence_rescaling_of_a_trace() {
        let t = SymbolTable::standard();
        let map = MonomialSubstitution::identity(&t)
            .set(sym::G_3, int(1), Monomial::var(sym::G_3).mul(&Monomial::var_pow(sym::EPS, -1)))
            .unwrap();
        let out = CoeffPoly::std("g3 + g3^-1").substitute(&map).unwrap();
        assert_eq!(out, CoeffPoly::std("eps^-1*g3 + eps*g3^-1"));
    }

    #[test]
    fn identity_map_is_identity() {
        let t = SymbolTable::standard();
        let id = MonomialSubstitution::identity(&t);
        assert!(id.is_identity());
        let p = CoeffPoly::std("Ginf^2");
        assert_eq!(p.substitute(&id).unwrap(), p);
    }

    #[test]
    fn zero_coefficient_is_malformed() {
        let t = SymbolTable::standard();
        let r = MonomialSubstitution::identity(&t).set(sym::G_1, int(0), Monomial::ONE);
        assert!(matches!(r, Err(RingError::MalformedMap(_))));
        let r = MonomialSubstitution::from_polys(&t, &[(sym::G_1, CoeffPoly::std("g1 + 1"))]);
        assert!(matches!(r, Err(RingError::MalformedMap(_))));
    }

    #[test]
    fn composition_applies_in_order() {
        let t = SymbolTable::standard();
        let a = MonomialSubstitution::from_polys(&t, &[(sym::E1, CoeffPoly::std("eps^-1*E1"))]).unwrap();
        let b = MonomialSubstitution::from_polys(&t, &[(sym::EPS, CoeffPoly::std("2*eps^3"))]).unwrap();
        let ab = a.then(&b).unwrap();
        let p = CoeffPoly::std("E1^2 + eps");
        assert_eq!(p.substitute(&ab).unwrap(), p.substitute(&a).unwrap().substitute(&b).unwrap());
        assert_eq!(p.substitute(&ab).unwrap(), CoeffPoly::std("1/4*eps^-6*E1^2 + 2*eps^3"));
    }
}
