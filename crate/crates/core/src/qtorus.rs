//! Quantum torus in the exponentials `E_i = e^{s̃_i}`.
//!
//! Elements are stored in the normal order `E1^a1 E2^a2 E3^a3`. In quantum
//! mode two monomials multiply as `E^a·E^b = qh^{2χ(a,b)} E^{a+b}`; in
//! classical mode the algebra is commutative and carries the log-canonical
//! Poisson bracket `{E^a, E^b} = ⟨a,b⟩ E^{a+b}`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::coeffring::{
    same_table, CoeffPoly, Monomial, MonomialSubstitution, RingError, Symbol, SymbolTable,
};

pub type Exp3 = [i32; 3];

#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Quantum,
    Classical,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorusError {
    #[error("operands have different modes")]
    ModeMismatch,
    #[error("operation requires a {0:?}-mode element")]
    WrongMode(Mode),
    #[error("classical coefficient mentions qh: {0}")]
    QhInClassical(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// The antisymmetric exchange data of the three shear coordinates,
/// `{s̃1,s̃2} = {s̃2,s̃3} = {s̃3,s̃1} = 1`.
#[derive(Copy, Clone, Debug, Default)]
pub struct ExchangeData;

impl ExchangeData {
    pub fn pairing(a: Exp3, b: Exp3) -> i32 {
        (a[0] * b[1] - a[1] * b[0]) + (a[1] * b[2] - a[2] * b[1]) + (a[2] * b[0] - a[0] * b[2])
    }
}

/// Reordering exponent: `E^a E^b = qh^{2χ(a,b)} E^{a+b}`.
pub fn chi(a: Exp3, b: Exp3) -> i32 {
    a[1] * b[0] - a[2] * b[0] + a[2] * b[1]
}

/// Weyl phase: `e^{a·S} = qh^{σ(a)} E^a`.
pub fn sigma(a: Exp3) -> i32 {
    a[0] * a[1] + a[1] * a[2] - a[0] * a[2]
}

fn add3(a: Exp3, b: Exp3) -> Exp3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Normal-ordered Laurent polynomial in `E1, E2, E3` over [`CoeffPoly`].
#[derive(Clone, PartialEq, Eq)]
pub struct TorusElement {
    mode: Mode,
    table: Arc<SymbolTable>,
    terms: BTreeMap<Exp3, CoeffPoly>,
}

impl TorusElement {
    pub fn zero(mode: Mode, table: &Arc<SymbolTable>) -> TorusElement {
        TorusElement { mode, table: table.clone(), terms: BTreeMap::new() }
    }

    pub fn scalar(mode: Mode, c: CoeffPoly) -> TorusElement {
        TorusElement::monomial(mode, [0, 0, 0], c)
    }

    pub fn one(mode: Mode, table: &Arc<SymbolTable>) -> TorusElement {
        TorusElement::scalar(mode, CoeffPoly::one(table))
    }

    pub fn monomial(mode: Mode, e: Exp3, c: CoeffPoly) -> TorusElement {
        let table = c.table().clone();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        TorusElement { mode, table, terms }
    }

    /// Reads a commutative polynomial in which `E1, E2, E3` are ordinary
    /// symbols; each term is taken as the normal-ordered monomial.
    pub fn from_flat(mode: Mode, p: &CoeffPoly) -> Result<TorusElement, TorusError> {
        let table = p.table().clone();
        let (e1, e2, e3) = e_symbols(&table)?;
        let mut terms: BTreeMap<Exp3, CoeffPoly> = BTreeMap::new();
        for (key, c) in p.split_by_many(&[e1, e2, e3]) {
            if mode == Mode::Classical && qh_symbol(&table).is_some_and(|q| c.mentions(q)) {
                return Err(TorusError::QhInClassical(c.to_string()));
            }
            terms.insert([key[0], key[1], key[2]], c);
        }
        Ok(TorusElement { mode, table, terms })
    }

    /// Classical element from a standard-table literal such as
    /// `-E2*E3 - G2*E3`.
    pub fn classical(src: &str) -> TorusElement {
        TorusElement::from_flat(Mode::Classical, &CoeffPoly::std(src)).expect("classical literal")
    }

    /// Inverse of [`TorusElement::from_flat`].
    pub fn to_flat(&self) -> CoeffPoly {
        let (e1, e2, e3) = e_symbols(&self.table).expect("table has E symbols");
        let mut out = CoeffPoly::zero(&self.table);
        for (a, c) in &self.terms {
            let m = Monomial::ONE
                .with_exponent(e1, a[0])
                .with_exponent(e2, a[1])
                .with_exponent(e3, a[2]);
            out += &c.mul_monomial(&m, &crate::coeffring::int(1));
        }
        out
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn table(&self) -> &Arc<SymbolTable> {
        &self.table
    }

    pub fn terms(&self) -> &BTreeMap<Exp3, CoeffPoly> {
        &self.terms
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

    pub fn coefficient(&self, e: Exp3) -> CoeffPoly {
        self.terms.get(&e).cloned().unwrap_or_else(|| CoeffPoly::zero(&self.table))
    }

    /// The part with exponent `(0,0,0)`, if that is the only term.
    pub fn as_scalar(&self) -> Option<CoeffPoly> {
        match self.terms.len() {
            0 => Some(CoeffPoly::zero(&self.table)),
            1 => self.terms.get(&[0, 0, 0]).cloned(),
            _ => None,
        }
    }

    /// True when every exponent is a multiple of `(1,1,1)`.
    pub fn is_central(&self) -> bool {
        self.terms.keys().all(|a| a[0] == a[1] && a[1] == a[2])
    }

    fn compatible(&self, o: &TorusElement) -> Result<(), TorusError> {
        if self.mode != o.mode {
            return Err(TorusError::ModeMismatch);
        }
        if !same_table(&self.table, &o.table) {
            return Err(RingError::TableMismatch.into());
        }
        Ok(())
    }

    pub fn try_add(&self, o: &TorusElement) -> Result<TorusElement, TorusError> {
        self.compatible(o)?;
        let mut out = self.clone();
        for (a, c) in &o.terms {
            out.accumulate(*a, c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, o: &TorusElement) -> Result<TorusElement, TorusError> {
        self.try_add(&-o)
    }

    fn accumulate(&mut self, a: Exp3, c: &CoeffPoly) {
        match self.terms.get_mut(&a) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&a);
                }
            }
            None => {
                if !c.is_zero() {
                    self.terms.insert(a, c.clone());
                }
            }
        }
    }

    pub fn try_mul(&self, o: &TorusElement) -> Result<TorusElement, TorusError> {
        self.compatible(o)?;
        let qh = match self.mode {
            Mode::Quantum => Some(qh_symbol(&self.table).ok_or(TorusError::WrongMode(Mode::Classical))?),
            Mode::Classical => None,
        };
        let one = crate::coeffring::int(1);
        let mut acc: BTreeMap<Exp3, CoeffPoly> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let mut c = ca * cb;
                if let Some(q) = qh {
                    let k = 2 * chi(*a, *b);
                    if k != 0 {
                        c = c.mul_monomial(&Monomial::var_pow(q, k), &one);
                    }
                }
                let e = add3(*a, *b);
                match acc.get_mut(&e) {
                    Some(v) => *v += &c,
                    None => {
                        acc.insert(e, c);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(TorusElement { mode: self.mode, table: self.table.clone(), terms: acc })
    }

    pub fn scale(&self, c: &CoeffPoly) -> TorusElement {
        let terms = self
            .terms
            .iter()
            .map(|(a, v)| (*a, v * c))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        TorusElement { mode: self.mode, table: self.table.clone(), terms }
    }

    pub fn pow(&self, k: u32) -> TorusElement {
        let mut out = TorusElement::one(self.mode, &self.table);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// `c·qh^{σ(a)}·E^a`, the Weyl-ordered image of `c·e^{a·S}`.
    pub fn weyl_quantize(a: Exp3, c: CoeffPoly) -> TorusElement {
        let q = qh_symbol(c.table()).expect("table has qh");
        let c = c.mul_monomial(&Monomial::var_pow(q, sigma(a)), &crate::coeffring::int(1));
        TorusElement::monomial(Mode::Quantum, a, c)
    }

    /// Termwise Weyl quantisation of a classical element.
    pub fn quantize(&self) -> Result<TorusElement, TorusError> {
        if self.mode != Mode::Classical {
            return Err(TorusError::WrongMode(Mode::Classical));
        }
        let mut out = TorusElement::zero(Mode::Quantum, &self.table);
        for (a, c) in &self.terms {
            out.accumulate(*a, TorusElement::weyl_quantize(*a, c.clone()).terms.get(a).unwrap());
        }
        Ok(out)
    }

    /// `qh ↦ 1`, switching to classical mode.
    pub fn classical_limit(&self) -> Result<TorusElement, TorusError> {
        if self.mode != Mode::Quantum {
            return Err(TorusError::WrongMode(Mode::Quantum));
        }
        let q = qh_symbol(&self.table).expect("table has qh");
        let one = CoeffPoly::one(&self.table);
        let mut out = TorusElement::zero(Mode::Classical, &self.table);
        for (a, c) in &self.terms {
            out.accumulate(*a, &c.specialize(&[(q, one.clone())])?);
        }
        Ok(out)
    }

    pub fn poisson(&self, o: &TorusElement) -> Result<TorusElement, TorusError> {
        self.compatible(o)?;
        if self.mode != Mode::Classical {
            return Err(TorusError::WrongMode(Mode::Classical));
        }
        let mut acc: BTreeMap<Exp3, CoeffPoly> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let k = ExchangeData::pairing(*a, *b);
                if k == 0 {
                    continue;
                }
                let c = (ca * cb).scale(&crate::coeffring::int(k as i64));
                match acc.get_mut(&add3(*a, *b)) {
                    Some(v) => *v += &c,
                    None => {
                        acc.insert(add3(*a, *b), c);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(TorusElement { mode: Mode::Classical, table: self.table.clone(), terms: acc })
    }

    /// Anti-involution: reverses products and sends `qh ↦ qh⁻¹`; the
    /// remaining coefficient symbols are treated as real.
    pub fn hermitian_conjugate(&self) -> TorusElement {
        let table = &self.table;
        match self.mode {
            Mode::Classical => self.clone(),
            Mode::Quantum => {
                let q = qh_symbol(table).expect("table has qh");
                let inv = CoeffPoly::var_pow(table, q, -1);
                let mut out = TorusElement::zero(Mode::Quantum, table);
                for (a, c) in &self.terms {
                    let c = c.specialize(&[(q, inv.clone())]).expect("qh is invertible");
                    let one = CoeffPoly::one(table);
                    let reversed = &(&TorusElement::monomial(Mode::Quantum, [0, 0, a[2]], c)
                        * &TorusElement::monomial(Mode::Quantum, [0, a[1], 0], one.clone()))
                        * &TorusElement::monomial(Mode::Quantum, [a[0], 0, 0], one);
                    out = &out + &reversed;
                }
                out
            }
        }
    }

    /// Applies a map to the coefficients only.
    pub fn map_coefficients<F>(&self, f: F) -> Result<TorusElement, TorusError>
    where
        F: Fn(&CoeffPoly) -> Result<CoeffPoly, RingError>,
    {
        let mut out = TorusElement::zero(self.mode, &self.table);
        for (a, c) in &self.terms {
            out.accumulate(*a, &f(c)?);
        }
        Ok(out)
    }

    pub fn specialize_coeffs(&self, assignments: &[(Symbol, CoeffPoly)]) -> Result<TorusElement, TorusError> {
        self.map_coefficients(|c| c.specialize(assignments))
    }

    /// Monomial substitution. Quantum elements accept only rescalings
    /// `E_i ↦ (coefficient monomial)·E_i`, which keep normal order intact.
    pub fn substitute(&self, map: &MonomialSubstitution) -> Result<TorusElement, TorusError> {
        let (e1, e2, e3) = e_symbols(&self.table)?;
        match self.mode {
            Mode::Classical => TorusElement::from_flat(Mode::Classical, &self.to_flat().substitute(map)?),
            Mode::Quantum => {
                for (i, e) in [e1, e2, e3].into_iter().enumerate() {
                    if let Some((_, m)) = map.image(e) {
                        let ok = [e1, e2, e3]
                            .iter()
                            .enumerate()
                            .all(|(j, s)| m.exponent(*s) == i32::from(i == j));
                        if !ok {
                            return Err(RingError::MalformedMap(
                                "quantum substitution must rescale each E_i".into(),
                            )
                            .into());
                        }
                    }
                }
                let mut out = TorusElement::zero(Mode::Quantum, &self.table);
                for (a, c) in &self.terms {
                    let flat = c.mul_monomial(
                        &Monomial::ONE.with_exponent(e1, a[0]).with_exponent(e2, a[1]).with_exponent(e3, a[2]),
                        &crate::coeffring::int(1),
                    );
                    let img = flat.substitute(map)?;
                    for (key, cc) in img.split_by_many(&[e1, e2, e3]) {
                        out.accumulate([key[0], key[1], key[2]], &cc);
                    }
                }
                Ok(out)
            }
        }
    }

    /// Quotient by the central relation `e^{s̃1+s̃2+s̃3} = 1`, written with
    /// `E3` eliminated. In quantum mode the Weyl element of `(1,1,1)` is the
    /// one set to 1.
    pub fn reduce_central(&self) -> TorusElement {
        let q = qh_symbol(&self.table);
        let one = crate::coeffring::int(1);
        let mut out = TorusElement::zero(self.mode, &self.table);
        for (a, c) in &self.terms {
            let k = a[2];
            let b = [a[0] - k, a[1] - k, 0];
            let c = match (self.mode, q) {
                (Mode::Quantum, Some(q)) => {
                    let shift = sigma(b) - sigma(*a);
                    c.mul_monomial(&Monomial::var_pow(q, shift), &one)
                }
                _ => c.clone(),
            };
            out.accumulate(b, &c);
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "mode": self.mode,
            "terms": self
                .terms
                .iter()
                .map(|(a, c)| json!({ "e": a, "c": c.to_json() }))
                .collect::<Vec<_>>(),
        })
    }
}

fn e_symbols(table: &SymbolTable) -> Result<(Symbol, Symbol, Symbol), RingError> {
    let get = |n: &str| table.symbol(n).ok_or_else(|| RingError::UnknownSymbol(n.to_string()));
    Ok((get("E1")?, get("E2")?, get("E3")?))
}

fn qh_symbol(table: &SymbolTable) -> Option<Symbol> {
    table.symbol("qh")
}

impl fmt::Display for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (a, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono: Vec<String> = (0..3)
                .filter(|&i| a[i] != 0)
                .map(|i| if a[i] == 1 { format!("E{}", i + 1) } else { format!("E{}^{}", i + 1, a[i]) })
                .collect();
            if mono.is_empty() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TorusElement[{:?}]({})", self.mode, self)
    }
}

macro_rules! torus_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&TorusElement> for &TorusElement {
            type Output = TorusElement;
            fn $method(self, rhs: &TorusElement) -> TorusElement {
                self.$checked(rhs).expect("incompatible torus elements")
            }
        }
        impl $trait<TorusElement> for TorusElement {
            type Output = TorusElement;
            fn $method(self, rhs: TorusElement) -> TorusElement {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&TorusElement> for TorusElement {
            type Output = TorusElement;
            fn $method(self, rhs: &TorusElement) -> TorusElement {
                (&self).$method(rhs)
            }
        }
    };
}

torus_binop!(Add, add, try_add);
torus_binop!(Sub, sub, try_sub);
torus_binop!(Mul, mul, try_mul);

impl Neg for &TorusElement {
    type Output = TorusElement;
    fn neg(self) -> TorusElement {
        TorusElement {
            mode: self.mode,
            table: self.table.clone(),
            terms: self.terms.iter().map(|(a, c)| (*a, -c)).collect(),
        }
    }
}

impl Neg for TorusElement {
    type Output = TorusElement;
    fn neg(self) -> TorusElement {
        -&self
    }
}

/// The central monomial `E1E2E3` in the given mode, Weyl-quantised in
/// quantum mode.
pub fn central_unit(mode: Mode, k: i32) -> TorusElement {
    let c = CoeffPoly::one(&SymbolTable::standard());
    match mode {
        Mode::Classical => TorusElement::monomial(Mode::Classical, [k, k, k], c),
        Mode::Quantum => TorusElement::weyl_quantize([k, k, k], c),
    }
}
