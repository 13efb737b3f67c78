//! Parser for the `coeff` command's polynomial expressions.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr   := factor ( '*' factor )*
//! factor := atom ( '^' UINT )?
//! atom   := INT | 'x' UINT | 'sum' | '(' 'sum' ')' | 'vdm' '(' UINT ',' UINT ')'
//! ```
//!
//! `sum` is `x1 + ... + xn` for the ambient arity, `vdm(n, e)` the product
//! `prod_{i<j} (x_i - x_j)^e` (its `n` must equal the ambient arity), and
//! `x<i>` a single 1-based variable. Integer literals may be negative.
//! The whole expression is the product of its factors, evaluated with the
//! given truncation cap.

use num_bigint::BigInt;

use crate::polyring::{
    sum_of_vars, vandermonde_power, ExponentCap, RingTag, SparsePoly,
};

/// A parse or semantic error, with the byte offset it occurred at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprError {
    pub pos: usize,
    pub msg: String,
}

impl std::fmt::Display for ExprError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "parse error at position {}: {}", self.pos, self.msg)
    }
}

impl std::error::Error for ExprError {}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    arity: usize,
    cap: ExponentCap,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError { pos: self.pos, msg: msg.into() })
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

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        match self.peek() {
            Some(got) if got == c => {
                self.pos += 1;
                Ok(())
            }
            Some(got) => self.err(format!("expected '{}', found '{}'", c as char, got as char)),
            None => self.err(format!("expected '{}', found end of input", c as char)),
        }
    }

    fn uint(&mut self) -> Result<u32, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected an unsigned integer");
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse::<u32>()
            .map_err(|e| ExprError { pos: start, msg: format!("bad integer: {e}") })
    }

    fn keyword(&mut self, word: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(word.as_bytes()) {
            self.pos += word.len();
            true
        } else {
            false
        }
    }

    fn atom(&mut self) -> Result<SparsePoly, ExprError> {
        let ring = RingTag::Integers;
        match self.peek() {
            Some(b'(') => {
                self.bump();
                if !self.keyword("sum") {
                    return self.err("expected 'sum' inside parentheses");
                }
                self.expect(b')')?;
                Ok(sum_of_vars(self.arity, ring))
            }
            Some(b'v') => {
                let at = self.pos;
                if !self.keyword("vdm") {
                    return self.err("expected 'vdm'");
                }
                self.expect(b'(')?;
                let n = self.uint()?;
                self.expect(b',')?;
                let e = self.uint()?;
                self.expect(b')')?;
                if n as usize != self.arity {
                    return Err(ExprError {
                        pos: at,
                        msg: format!("vdm arity {n} does not match --n {}", self.arity),
                    });
                }
                vandermonde_power(self.arity, e, ring, &self.cap)
                    .map_err(|e| ExprError { pos: at, msg: e.to_string() })
            }
            Some(b's') => {
                if !self.keyword("sum") {
                    return self.err("expected 'sum'");
                }
                Ok(sum_of_vars(self.arity, ring))
            }
            Some(b'x') => {
                self.bump();
                let at = self.pos;
                let i = self.uint()?;
                if i < 1 || i as usize > self.arity {
                    return Err(ExprError {
                        pos: at,
                        msg: format!("variable x{i} outside arity {}", self.arity),
                    });
                }
                Ok(SparsePoly::variable(self.arity, ring, i as usize - 1))
            }
            Some(c) if c == b'-' || c.is_ascii_digit() => {
                let negative = c == b'-';
                if negative {
                    self.bump();
                }
                let v = self.uint()?;
                let value = if negative { -BigInt::from(v) } else { BigInt::from(v) };
                Ok(SparsePoly::constant(self.arity, ring.from_bigint(&value), ring))
            }
            Some(c) => self.err(format!("unexpected character '{}'", c as char)),
            None => self.err("unexpected end of input"),
        }
    }

    fn factor(&mut self) -> Result<SparsePoly, ExprError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.bump();
            let e = self.uint()?;
            base.pow(e, &self.cap)
                .map_err(|err| ExprError { pos: self.pos, msg: err.to_string() })
        } else {
            Ok(base)
        }
    }

    fn expr(&mut self) -> Result<SparsePoly, ExprError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.bump();
            let rhs = self.factor()?;
            acc = acc
                .truncated_mul(&rhs, &self.cap)
                .map_err(|err| ExprError { pos: self.pos, msg: err.to_string() })?;
        }
        self.skip_ws();
        if self.pos != self.src.len() {
            return self.err("trailing input after expression");
        }
        Ok(acc)
    }
}

/// Parses and evaluates an expression over the integers with the given
/// truncation cap. Coefficients of monomials below the cap are exact.
pub fn eval_expr(src: &str, arity: usize, cap: &ExponentCap) -> Result<SparsePoly, ExprError> {
    let mut parser = Parser { src: src.as_bytes(), pos: 0, arity, cap: cap.clone() };
    parser.expr()
}
