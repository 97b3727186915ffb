use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use super::RingError;

/// Upper bound on the number of symbols a table may hold.
///
/// Exponent vectors are stored inline at this width, which keeps monomials
/// `Copy` and allocation free.
pub const MAX_SYMBOLS: usize = 32;

/// Index of a symbol inside a [`SymbolTable`].
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Symbol(pub(crate) u8);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Ordered list of named, invertible, commuting symbols.
#[derive(Clone, PartialEq, Eq)]
pub struct SymbolTable {
    names: Vec<String>,
    lookup: HashMap<String, Symbol>,
}

impl SymbolTable {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<SymbolTable, RingError> {
        if names.len() > MAX_SYMBOLS {
            return Err(RingError::TableFull(names.len()));
        }
        let mut lookup = HashMap::with_capacity(names.len());
        let mut owned = Vec::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            let n = n.as_ref().to_string();
            if n.is_empty() || !n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(RingError::BadSymbolName(n));
            }
            if lookup.insert(n.clone(), Symbol(i as u8)).is_some() {
                return Err(RingError::DuplicateSymbol(n));
            }
            owned.push(n);
        }
        Ok(SymbolTable { names: owned, lookup })
    }

    /// The table shared by the whole engine; see [`sym`] for its indices.
    pub fn standard() -> Arc<SymbolTable> {
        static STANDARD: OnceLock<Arc<SymbolTable>> = OnceLock::new();
        STANDARD
            .get_or_init(|| Arc::new(SymbolTable::new(STANDARD_NAMES).expect("standard table")))
            .clone()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.lookup.get(name).copied()
    }

    pub fn name(&self, s: Symbol) -> &str {
        &self.names[s.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        (0..self.names.len()).map(|i| Symbol(i as u8))
    }
}

impl fmt::Debug for SymbolTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names.iter()).finish()
    }
}

pub(crate) fn same_table(a: &Arc<SymbolTable>, b: &Arc<SymbolTable>) -> bool {
    Arc::ptr_eq(a, b) || a.names == b.names
}

pub const STANDARD_NAMES: &[&str] = &[
    "qh", "eps", "g1", "g2", "g3", "G1", "G2", "G3", "Ginf", "a", "b", "g", "h", "u", "v", "E1",
    "E2", "E3", "x1", "x2", "x3", "w1", "w2", "w3", "w4",
];

/// Symbol indices of [`SymbolTable::standard`].
pub mod sym {
    use super::Symbol;

    pub const QH: Symbol = Symbol(0);
    pub const EPS: Symbol = Symbol(1);
    pub const G_1: Symbol = Symbol(2);
    pub const G_2: Symbol = Symbol(3);
    pub const G_3: Symbol = Symbol(4);
    pub const BIG_G1: Symbol = Symbol(5);
    pub const BIG_G2: Symbol = Symbol(6);
    pub const BIG_G3: Symbol = Symbol(7);
    pub const GINF: Symbol = Symbol(8);
    pub const A: Symbol = Symbol(9);
    pub const B: Symbol = Symbol(10);
    pub const G: Symbol = Symbol(11);
    pub const H: Symbol = Symbol(12);
    pub const U: Symbol = Symbol(13);
    pub const V: Symbol = Symbol(14);
    pub const E1: Symbol = Symbol(15);
    pub const E2: Symbol = Symbol(16);
    pub const E3: Symbol = Symbol(17);
    pub const X1: Symbol = Symbol(18);
    pub const X2: Symbol = Symbol(19);
    pub const X3: Symbol = Symbol(20);
    pub const W1: Symbol = Symbol(21);
    pub const W2: Symbol = Symbol(22);
    pub const W3: Symbol = Symbol(23);
    pub const W4: Symbol = Symbol(24);

    pub const SMALL_G: [Symbol; 3] = [G_1, G_2, G_3];
    pub const BIG_G: [Symbol; 4] = [BIG_G1, BIG_G2, BIG_G3, GINF];
    pub const E: [Symbol; 3] = [E1, E2, E3];
    pub const X: [Symbol; 3] = [X1, X2, X3];
    pub const W: [Symbol; 4] = [W1, W2, W3, W4];
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_indices_match_names() {
        let t = SymbolTable::standard();
        assert_eq!(t.symbol("qh"), Some(sym::QH));
        assert_eq!(t.symbol("Ginf"), Some(sym::GINF));
        assert_eq!(t.symbol("E3"), Some(sym::E3));
        assert_eq!(t.symbol("x2"), Some(sym::X2));
        assert_eq!(t.symbol("w4"), Some(sym::W4));
        assert_eq!(t.symbol("h"), Some(sym::H));
        assert_eq!(t.len(), STANDARD_NAMES.len());
    }

    #[test]
    fn duplicate_names_rejected() {
        assert!(matches!(SymbolTable::new(&["a", "b", "a"]), Err(RingError::DuplicateSymbol(_))));
        assert!(SymbolTable::new(&["a b"]).is_err());
    }
}
