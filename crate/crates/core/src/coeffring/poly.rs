use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use super::symbols::{same_table, Symbol, SymbolTable, MAX_SYMBOLS};
use super::{format_rational, parse_rational, rational_pow, Rational, RingError};

/// Laurent monomial: one signed exponent per symbol of the owning table.
///
/// The derived ordering is lexicographic with the first table symbol most
/// significant; it fixes the canonical term order of [`CoeffPoly`].
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial([i16; MAX_SYMBOLS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; MAX_SYMBOLS]);

    pub fn var(s: Symbol) -> Monomial {
        Monomial::var_pow(s, 1)
    }

    pub fn var_pow(s: Symbol, e: i32) -> Monomial {
        let mut m = Monomial::ONE;
        m.0[s.index()] = e as i16;
        m
    }

    pub fn from_exponents(exps: &[i32]) -> Monomial {
        assert!(exps.len() <= MAX_SYMBOLS);
        let mut m = Monomial::ONE;
        for (slot, &e) in m.0.iter_mut().zip(exps) {
            *slot = i16::try_from(e).expect("exponent out of range");
        }
        m
    }

    pub fn exponent(&self, s: Symbol) -> i32 {
        self.0[s.index()] as i32
    }

    pub fn with_exponent(mut self, s: Symbol, e: i32) -> Monomial {
        self.0[s.index()] = e as i16;
        self
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn exponents(&self, len: usize) -> Vec<i32> {
        self.0[..len].iter().map(|&e| e as i32).collect()
    }

    pub fn total_degree(&self) -> i32 {
        self.0.iter().map(|&e| e as i32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(other.0.iter()) {
            *a = a.checked_add(*b).expect("exponent overflow");
        }
        out
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        self.mul(&other.inv())
    }

    pub fn inv(&self) -> Monomial {
        let mut out = *self;
        for a in out.0.iter_mut() {
            *a = -*a;
        }
        out
    }

    pub fn pow(&self, k: i32) -> Monomial {
        let mut out = *self;
        for a in out.0.iter_mut() {
            *a = i16::try_from(*a as i32 * k).expect("exponent overflow");
        }
        out
    }

    pub fn gcd_min(&self, other: &Monomial) -> Monomial {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(other.0.iter()) {
            *a = (*a).min(*b);
        }
        out
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&e| e >= 0)
    }

    pub(crate) fn support(&self) -> impl Iterator<Item = (Symbol, i32)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(|(i, &e)| (Symbol(i as u8), e as i32))
    }

    pub fn display(&self, table: &SymbolTable) -> String {
        let parts: Vec<String> = self
            .support()
            .map(|(s, e)| {
                if e == 1 {
                    table.name(s).to_string()
                } else {
                    format!("{}^{}", table.name(s), e)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<(usize, i32)> = self.support().map(|(s, e)| (s.index(), e)).collect();
        write!(f, "Monomial{:?}", v)
    }
}

/// Exact commutative Laurent polynomial with rational coefficients.
#[derive(Clone)]
pub struct CoeffPoly {
    table: Arc<SymbolTable>,
    terms: BTreeMap<Monomial, Rational>,
}

impl PartialEq for CoeffPoly {
    fn eq(&self, other: &Self) -> bool {
        same_table(&self.table, &other.table) && self.terms == other.terms
    }
}

impl Eq for CoeffPoly {}

impl CoeffPoly {
    pub fn zero(table: &Arc<SymbolTable>) -> CoeffPoly {
        CoeffPoly { table: table.clone(), terms: BTreeMap::new() }
    }

    pub fn one(table: &Arc<SymbolTable>) -> CoeffPoly {
        CoeffPoly::constant(table, Rational::one())
    }

    pub fn constant(table: &Arc<SymbolTable>, c: Rational) -> CoeffPoly {
        CoeffPoly::term(table, Monomial::ONE, c)
    }

    pub fn int(table: &Arc<SymbolTable>, n: i64) -> CoeffPoly {
        CoeffPoly::constant(table, super::int(n))
    }

    pub fn var(table: &Arc<SymbolTable>, s: Symbol) -> CoeffPoly {
        CoeffPoly::term(table, Monomial::var(s), Rational::one())
    }

    pub fn var_pow(table: &Arc<SymbolTable>, s: Symbol, e: i32) -> CoeffPoly {
        CoeffPoly::term(table, Monomial::var_pow(s, e), Rational::one())
    }

    pub fn term(table: &Arc<SymbolTable>, m: Monomial, c: Rational) -> CoeffPoly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        CoeffPoly { table: table.clone(), terms }
    }

    /// Builds a polynomial from raw terms, collecting like monomials.
    pub fn from_terms<I>(table: &Arc<SymbolTable>, terms: I) -> CoeffPoly
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (m, c) in terms {
            accumulate(&mut acc, m, c);
        }
        acc.retain(|_, c| !c.is_zero());
        CoeffPoly { table: table.clone(), terms: acc }
    }

    /// Parses the small infix grammar used throughout the catalog, e.g.
    /// `-E2*E3 - E2^-1*E3 - G2*E3 - g3*E2^-1`.
    pub fn parse(table: &Arc<SymbolTable>, src: &str) -> Result<CoeffPoly, RingError> {
        super::parse::parse(table, src)
    }

    /// Parses against the standard table; panics on malformed input, so it
    /// is meant for literals fixed in source.
    pub fn std(src: &str) -> CoeffPoly {
        CoeffPoly::parse(&SymbolTable::standard(), src)
            .unwrap_or_else(|e| panic!("bad literal `{src}`: {e}"))
    }

    pub fn table(&self) -> &Arc<SymbolTable> {
        &self.table
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, Rational> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn as_monomial(&self) -> Option<(Monomial, Rational)> {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            Some((*m, c.clone()))
        } else {
            None
        }
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn mentions(&self, s: Symbol) -> bool {
        self.terms.keys().any(|m| m.exponent(s) != 0)
    }

    pub fn symbols_used(&self) -> Vec<Symbol> {
        self.table.symbols().filter(|&s| self.mentions(s)).collect()
    }

    pub fn degree_range(&self, s: Symbol) -> Option<(i32, i32)> {
        let mut it = self.terms.keys().map(|m| m.exponent(s));
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), e| (lo.min(e), hi.max(e))))
    }

    /// Componentwise minimum exponent over all terms (the monomial content).
    pub fn min_monomial(&self) -> Option<Monomial> {
        let mut it = self.terms.keys();
        let first = *it.next()?;
        Some(it.fold(first, |acc, m| acc.gcd_min(m)))
    }

    pub fn check_table(&self, other: &CoeffPoly) -> Result<(), RingError> {
        if same_table(&self.table, &other.table) {
            Ok(())
        } else {
            Err(RingError::TableMismatch)
        }
    }

    pub fn try_add(&self, other: &CoeffPoly) -> Result<CoeffPoly, RingError> {
        self.check_table(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            accumulate_pruned(&mut out.terms, *m, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &CoeffPoly) -> Result<CoeffPoly, RingError> {
        self.check_table(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            accumulate_pruned(&mut out.terms, *m, -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &CoeffPoly) -> Result<CoeffPoly, RingError> {
        self.check_table(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(CoeffPoly::zero(&self.table));
        }
        if self.terms.len() * other.terms.len() <= 16 {
            let mut acc = BTreeMap::new();
            for (ma, ca) in &self.terms {
                for (mb, cb) in &other.terms {
                    accumulate(&mut acc, ma.mul(mb), ca * cb);
                }
            }
            acc.retain(|_, c: &mut Rational| !c.is_zero());
            return Ok(CoeffPoly { table: self.table.clone(), terms: acc });
        }
        let mut acc: HashMap<Monomial, Rational> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let prod = ca * cb;
                acc.entry(ma.mul(mb))
                    .and_modify(|c| *c += &prod)
                    .or_insert(prod);
            }
        }
        Ok(CoeffPoly {
            table: self.table.clone(),
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> CoeffPoly {
        if c.is_zero() {
            return CoeffPoly::zero(&self.table);
        }
        CoeffPoly {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> CoeffPoly {
        if c.is_zero() {
            return CoeffPoly::zero(&self.table);
        }
        CoeffPoly {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a * c)).collect(),
        }
    }

    /// Integer power; negative exponents are allowed for single-term
    /// polynomials only.
    pub fn pow(&self, k: i32) -> Result<CoeffPoly, RingError> {
        if k < 0 {
            let (m, c) = self.as_monomial().ok_or_else(|| {
                RingError::NotInvertible(self.to_string())
            })?;
            return Ok(CoeffPoly::term(&self.table, m.pow(k), rational_pow(&c, k)));
        }
        if let Some((m, c)) = self.as_monomial() {
            return Ok(CoeffPoly::term(&self.table, m.pow(k), rational_pow(&c, k)));
        }
        let mut result = CoeffPoly::one(&self.table);
        let mut base = self.clone();
        let mut e = k as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    /// Inverse of a single-term polynomial.
    pub fn inverse(&self) -> Result<CoeffPoly, RingError> {
        self.pow(-1)
    }

    /// Exact division in the Laurent ring.
    ///
    /// Both operands are first stripped of their monomial content; the
    /// remaining ordinary polynomials are divided with graded-lex leading
    /// terms. On failure the uncancellable remainder term is reported.
    pub fn exact_divide(&self, den: &CoeffPoly) -> Result<CoeffPoly, RingError> {
        self.check_table(den)?;
        if den.is_zero() {
            return Err(RingError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(CoeffPoly::zero(&self.table));
        }
        if let Some((m, c)) = den.as_monomial() {
            return Ok(self.mul_monomial(&m.inv(), &c.recip()));
        }
        let dshift = den.min_monomial().unwrap();
        let nshift = self.min_monomial().unwrap();
        let d: Vec<(Graded, Rational)> = den
            .terms
            .iter()
            .map(|(m, c)| (Graded(m.div(&dshift)), c.clone()))
            .collect();
        let (dlead, dlc) = d.iter().max_by(|a, b| a.0.cmp(&b.0)).cloned().unwrap();
        let mut rem: BTreeMap<Graded, Rational> = self
            .terms
            .iter()
            .map(|(m, c)| (Graded(m.div(&nshift)), c.clone()))
            .collect();
        let mut quot: BTreeMap<Monomial, Rational> = BTreeMap::new();
        while let Some((rlead, rlc)) = rem.iter().next_back().map(|(m, c)| (*m, c.clone())) {
            let t = rlead.0.div(&dlead.0);
            if !t.is_nonnegative() {
                let witness = CoeffPoly::term(&self.table, rlead.0.mul(&nshift), rlc);
                return Err(RingError::DivisionFailure { witness: witness.to_string() });
            }
            let qc = &rlc / &dlc;
            for (dm, dc) in &d {
                let key = Graded(dm.0.mul(&t));
                let delta = -(&qc * dc);
                match rem.get_mut(&key) {
                    Some(v) => {
                        *v += delta;
                        if v.is_zero() {
                            rem.remove(&key);
                        }
                    }
                    None => {
                        rem.insert(key, delta);
                    }
                }
            }
            quot.insert(t, qc);
        }
        let shift = nshift.div(&dshift);
        Ok(CoeffPoly {
            table: self.table.clone(),
            terms: quot.into_iter().map(|(m, c)| (m.mul(&shift), c)).collect(),
        })
    }

    /// Evaluation homomorphism sending each assigned symbol to a polynomial.
    /// Assignments are simultaneous.
    pub fn specialize(&self, assignments: &[(Symbol, CoeffPoly)]) -> Result<CoeffPoly, RingError> {
        for (_, v) in assignments {
            self.check_table(v)?;
        }
        if assignments.is_empty() {
            return Ok(self.clone());
        }
        let mut assigned = [None; MAX_SYMBOLS];
        for (i, (s, _)) in assignments.iter().enumerate() {
            assigned[s.index()] = Some(i);
        }
        // group terms by the exponents of assigned symbols
        let mut groups: BTreeMap<Vec<i32>, Vec<(Monomial, Rational)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key: Vec<i32> = assignments.iter().map(|(s, _)| m.exponent(*s)).collect();
            let mut rest = *m;
            for (s, _) in assignments {
                rest = rest.with_exponent(*s, 0);
            }
            groups.entry(key).or_default().push((rest, c.clone()));
        }
        let mut cache: HashMap<(usize, i32), CoeffPoly> = HashMap::new();
        let mut out = CoeffPoly::zero(&self.table);
        for (key, rest) in groups {
            let mut factor = CoeffPoly::one(&self.table);
            for (i, &e) in key.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = match cache.get(&(i, e)) {
                    Some(p) => p.clone(),
                    None => {
                        let img = &assignments[i].1;
                        let p = img.pow(e).map_err(|_| {
                            RingError::NotInvertible(self.table.name(assignments[i].0).to_string())
                        })?;
                        cache.insert((i, e), p.clone());
                        p
                    }
                };
                factor = &factor * &p;
                if factor.is_zero() {
                    break;
                }
            }
            if factor.is_zero() {
                continue;
            }
            let rest = CoeffPoly::from_terms(&self.table, rest);
            out += &(&rest * &factor);
        }
        Ok(out)
    }

    pub fn derivative(&self, s: Symbol) -> CoeffPoly {
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let e = m.exponent(s);
            (e != 0).then(|| (m.with_exponent(s, e - 1), c * super::int(e as i64)))
        });
        CoeffPoly::from_terms(&self.table, terms)
    }

    /// Splits into coefficients of powers of `s`: `self = Σ out[k]·s^k`.
    pub fn split_by(&self, s: Symbol) -> BTreeMap<i32, CoeffPoly> {
        let mut out: BTreeMap<i32, BTreeMap<Monomial, Rational>> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.exponent(s))
                .or_default()
                .insert(m.with_exponent(s, 0), c.clone());
        }
        out.into_iter()
            .map(|(k, terms)| (k, CoeffPoly { table: self.table.clone(), terms }))
            .collect()
    }

    /// Splits by the joint exponents of several symbols.
    pub fn split_by_many(&self, syms: &[Symbol]) -> BTreeMap<Vec<i32>, CoeffPoly> {
        let mut out: BTreeMap<Vec<i32>, BTreeMap<Monomial, Rational>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key: Vec<i32> = syms.iter().map(|s| m.exponent(*s)).collect();
            let mut rest = *m;
            for s in syms {
                rest = rest.with_exponent(*s, 0);
            }
            out.entry(key).or_default().insert(rest, c.clone());
        }
        out.into_iter()
            .map(|(k, terms)| (k, CoeffPoly { table: self.table.clone(), terms }))
            .collect()
    }

    /// Coefficient of `s^k`.
    pub fn coeff_of(&self, s: Symbol, k: i32) -> CoeffPoly {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.exponent(s) == k)
            .map(|(m, c)| (m.with_exponent(s, 0), c.clone()));
        CoeffPoly::from_terms(&self.table, terms)
    }

    pub fn map_coefficients<F: Fn(&Rational) -> Rational>(&self, f: F) -> CoeffPoly {
        CoeffPoly::from_terms(&self.table, self.terms.iter().map(|(m, c)| (*m, f(c))))
    }

    /// Stable JSON form: `[{exponents: [..], coeff: "num/den"}, ..]` in
    /// lexicographic exponent order.
    pub fn to_json(&self) -> Value {
        let n = self.table.len();
        Value::Array(
            self.terms
                .iter()
                .map(|(m, c)| json!({ "exponents": m.exponents(n), "coeff": format_rational(c) }))
                .collect(),
        )
    }

    pub fn from_json(table: &Arc<SymbolTable>, v: &Value) -> Result<CoeffPoly, RingError> {
        let bad = |msg: &str| RingError::Parse { pos: 0, msg: msg.to_string() };
        let arr = v.as_array().ok_or_else(|| bad("expected an array of terms"))?;
        let mut terms = Vec::with_capacity(arr.len());
        for t in arr {
            let exps = t
                .get("exponents")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("missing exponents"))?;
            if exps.len() != table.len() {
                return Err(bad("exponent vector length differs from the table"));
            }
            let exps: Vec<i32> = exps
                .iter()
                .map(|e| e.as_i64().map(|e| e as i32).ok_or_else(|| bad("non-integer exponent")))
                .collect::<Result<_, _>>()?;
            let c = t
                .get("coeff")
                .and_then(Value::as_str)
                .and_then(parse_rational)
                .ok_or_else(|| bad("bad coefficient"))?;
            terms.push((Monomial::from_exponents(&exps), c));
        }
        Ok(CoeffPoly::from_terms(table, terms))
    }
}

fn accumulate(acc: &mut BTreeMap<Monomial, Rational>, m: Monomial, c: Rational) {
    match acc.get_mut(&m) {
        Some(v) => *v += c,
        None => {
            acc.insert(m, c);
        }
    }
}

fn accumulate_pruned(acc: &mut BTreeMap<Monomial, Rational>, m: Monomial, c: Rational) {
    match acc.get_mut(&m) {
        Some(v) => {
            *v += c;
            if v.is_zero() {
                acc.remove(&m);
            }
        }
        None => {
            if !c.is_zero() {
                acc.insert(m, c);
            }
        }
    }
}

/// Graded-lex key: total degree first, then lexicographic.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
struct Graded(Monomial);

impl Ord for Graded {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .total_degree()
            .cmp(&other.0.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Graded {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CoeffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            if m.is_one() {
                write!(f, "{}", a)?;
            } else if a.is_one() {
                write!(f, "{}", m.display(&self.table))?;
            } else {
                write!(f, "{}*{}", a, m.display(&self.table))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CoeffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoeffPoly({})", self)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&CoeffPoly> for &CoeffPoly {
            type Output = CoeffPoly;
            fn $method(self, rhs: &CoeffPoly) -> CoeffPoly {
                self.$checked(rhs).expect("symbol-table mismatch")
            }
        }
        impl $trait<CoeffPoly> for CoeffPoly {
            type Output = CoeffPoly;
            fn $method(self, rhs: CoeffPoly) -> CoeffPoly {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&CoeffPoly> for CoeffPoly {
            type Output = CoeffPoly;
            fn $method(self, rhs: &CoeffPoly) -> CoeffPoly {
                (&self).$method(rhs)
            }
        }
        impl $trait<CoeffPoly> for &CoeffPoly {
            type Output = CoeffPoly;
            fn $method(self, rhs: CoeffPoly) -> CoeffPoly {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl AddAssign<&CoeffPoly> for CoeffPoly {
    fn add_assign(&mut self, rhs: &CoeffPoly) {
        self.check_table(rhs).expect("symbol-table mismatch");
        for (m, c) in &rhs.terms {
            accumulate_pruned(&mut self.terms, *m, c.clone());
        }
    }
}

impl SubAssign<&CoeffPoly> for CoeffPoly {
    fn sub_assign(&mut self, rhs: &CoeffPoly) {
        self.check_table(rhs).expect("symbol-table mismatch");
        for (m, c) in &rhs.terms {
            accumulate_pruned(&mut self.terms, *m, -c.clone());
        }
    }
}

impl Neg for &CoeffPoly {
    type Output = CoeffPoly;
    fn neg(self) -> CoeffPoly {
        CoeffPoly {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }
}

impl Neg for CoeffPoly {
    type Output = CoeffPoly;
    fn neg(mut self) -> CoeffPoly {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::{int, rat, sym};

    fn p(s: &str) -> CoeffPoly {
        CoeffPoly::std(s)
    }

    #[test]
    fn like_terms_collect() {
        assert_eq!(p("1/2*g1") + p("1/2*g1"), p("g1"));
        assert!((p("g1") - p("g1")).is_zero());
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(p("g1 + g1^-1") * p("g1 - g1^-1"), p("g1^2 - g1^-2"));
    }

    #[test]
    fn omega_one_of_d5_survives_unit_product() {
        let w = p("G1*Ginf + G2");
        assert_eq!(&w * &p("1"), w);
    }

    #[test]
    fn exact_division_examples() {
        assert_eq!(p("g1^2 - 1").exact_divide(&p("g1 - 1")).unwrap(), p("g1 + 1"));
        let err = p("g1^2 + 1").exact_divide(&p("g1 - 1")).unwrap_err();
        assert!(matches!(err, RingError::DivisionFailure { .. }));
        let num = p("(G2^2 + G3^2 + G1*G2*G3)*G2");
        assert_eq!(num.exact_divide(&p("G2")).unwrap(), p("G2^2 + G3^2 + G1*G2*G3"));
        assert_eq!(p("g1").exact_divide(&p("0")), Err(RingError::DivisionByZero));
    }

    #[test]
    fn laurent_division_strips_content() {
        let d = p("E1^-1 + G1 + E1");
        let q = p("E2^-1*E1^-2 + 3*E2");
        let n = &d * &q;
        assert_eq!(n.exact_divide(&d).unwrap(), q);
    }

    #[test]
    fn specialize_examples() {
        let g2 = CoeffPoly::int(&SymbolTable::standard(), 0);
        assert_eq!(p("G2*Ginf + 1").specialize(&[(sym::BIG_G2, g2)]).unwrap(), p("1"));
        let one = p("1");
        assert_eq!(
            p("1 + Ginf^2 + G1*G2*Ginf").specialize(&[(sym::GINF, one.clone())]).unwrap(),
            p("2 + G1*G2")
        );
        assert!(p("qh^2 - qh^-2").specialize(&[(sym::QH, one)]).unwrap().is_zero());
    }

    #[test]
    fn specialize_rejects_zero_for_negative_power() {
        let zero = p("0");
        let err = p("g1^-1 + 1").specialize(&[(sym::G_1, zero)]).unwrap_err();
        assert!(matches!(err, RingError::NotInvertible(_)));
    }

    #[test]
    fn specialize_is_simultaneous() {
        let swapped = p("x1 + 2*x2^2")
            .specialize(&[(sym::X1, p("x2")), (sym::X2, p("x1"))])
            .unwrap();
        assert_eq!(swapped, p("x2 + 2*x1^2"));
    }

    #[test]
    fn negative_power_of_monomial() {
        assert_eq!(p("2*g1*E1^-1").pow(-2).unwrap(), p("1/4*g1^-2*E1^2"));
        assert!(p("g1 + 1").pow(-1).is_err());
    }

    #[test]
    fn json_round_trip_and_order() {
        let t = SymbolTable::standard();
        let q = p("-3/2*g1^-1 + G2*Ginf + 5");
        let v = q.to_json();
        assert_eq!(CoeffPoly::from_json(&t, &v).unwrap(), q);
        let arr = v.as_array().unwrap();
        assert_eq!(arr.len(), 3);
        assert_eq!(arr[0]["coeff"], "-3/2");
        assert_eq!(arr[1]["coeff"], "5/1");
        assert_eq!(arr[2]["coeff"], "1/1");
    }

    #[test]
    fn derivative_and_split() {
        let q = p("x1^3*w1 + x1^-1 + 7");
        assert_eq!(q.derivative(sym::X1), p("3*x1^2*w1 - x1^-2"));
        let parts = q.split_by(sym::X1);
        assert_eq!(parts[&3], p("w1"));
        assert_eq!(parts[&0], p("7"));
        assert_eq!(q.coeff_of(sym::X1, -1), p("1"));
    }

    #[test]
    fn table_mismatch_is_an_error() {
        let other = Arc::new(SymbolTable::new(&["z"]).unwrap());
        let z = CoeffPoly::var(&other, Symbol(0));
        assert_eq!(p("g1").try_add(&z), Err(RingError::TableMismatch));
        assert_eq!(p("g1").try_mul(&z), Err(RingError::TableMismatch));
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(p("G1*Ginf + G2").to_string(), "G1*Ginf + G2");
        assert_eq!(p("-2*g1^-1").to_string(), "-2*g1^-1");
        assert_eq!(p("0").to_string(), "0");
        assert_eq!(CoeffPoly::constant(&SymbolTable::standard(), rat(-1, 3)).to_string(), "-1/3");
        assert_eq!(CoeffPoly::int(&SymbolTable::standard(), 4).as_constant(), Some(int(4)));
    }
}
