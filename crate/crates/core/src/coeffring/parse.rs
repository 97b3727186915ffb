use std::sync::Arc;

use num_bigint::BigInt;

use super::{CoeffPoly, Rational, RingError, SymbolTable};

// expr   := term (('+' | '-') term)*
// term   := unary (('*' | '/') unary)*
// unary  := '-' unary | power
// power  := atom ('^' '-'? integer)?
// atom   := integer | identifier | '(' expr ')'
pub(super) fn parse(table: &Arc<SymbolTable>, src: &str) -> Result<CoeffPoly, RingError> {
    let mut p = Parser { table, src: src.as_bytes(), pos: 0 };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    table: &'a Arc<SymbolTable>,
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> RingError {
        RingError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<CoeffPoly, RingError> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = acc.try_add(&self.term()?)?;
                }
                b'-' => {
                    self.pos += 1;
                    acc = acc.try_sub(&self.term()?)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<CoeffPoly, RingError> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    acc = acc.try_mul(&self.unary()?)?;
                }
                b'/' => {
                    self.pos += 1;
                    let den = self.unary()?;
                    acc = acc.exact_divide(&den)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<CoeffPoly, RingError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<CoeffPoly, RingError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let neg = if self.peek() == Some(b'-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let n = self.integer()?;
            let e: i32 = n.try_into().map_err(|_| self.error("exponent too large"))?;
            return base.pow(if neg { -e } else { e });
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt, RingError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(text.parse().unwrap())
    }

    fn atom(&mut self) -> Result<CoeffPoly, RingError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(CoeffPoly::constant(self.table, Rational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let s = self
                    .table
                    .symbol(name)
                    .ok_or_else(|| RingError::UnknownSymbol(name.to_string()))?;
                Ok(CoeffPoly::var(self.table, s))
            }
            _ => Err(self.error("expected a number, symbol or `(`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::{rat, sym};

    #[test]
    fn precedence_and_signs() {
        let t = SymbolTable::standard();
        let p = parse(&t, "-x1^2*3 + 1/2 - -g1").unwrap();
        let expected = CoeffPoly::var_pow(&t, sym::X1, 2).scale(&rat(-3, 1))
            + CoeffPoly::constant(&t, rat(1, 2))
            + CoeffPoly::var(&t, sym::G_1);
        assert_eq!(p, expected);
    }

    #[test]
    fn negative_exponents_and_groups() {
        let t = SymbolTable::standard();
        let p = parse(&t, "(E1*E2)^-1 + E1^-2").unwrap();
        assert_eq!(p.len(), 2);
        assert!(parse(&t, "(E1 + 1)^-1").is_err());
        assert!(matches!(parse(&t, "zz"), Err(RingError::UnknownSymbol(_))));
        assert!(parse(&t, "x1 +").is_err());
        assert!(parse(&t, "x1 )").is_err());
    }
}
