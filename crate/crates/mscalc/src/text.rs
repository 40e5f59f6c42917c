//! Shared term grammar for polynomials, multivectors and forms.
//!
//! `3/2*x1^2*x3 - x2`, `x1*d(2,3) + 1/2*d(1)`, `x2*dx(1,3)`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rat::{parse_q, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WedgeKind {
    Field,
    Form,
}

#[derive(Clone, Debug)]
pub struct RawTerm {
    pub coeff: Q,
    /// `(variable, exponent)` pairs, variables 1-based.
    pub vars: Vec<(usize, u32)>,
    /// 1-based index set.
    pub wedge: Option<(WedgeKind, Vec<usize>)>,
}

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
    src: &'a str,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn err(&self, what: &str) -> Error {
        Error::Malformed(format!("{what} at offset {} in `{}`", self.pos, self.src))
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_str(&mut self, lit: &str) -> bool {
        self.skip_ws();
        if self.s[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        Ok(&self.src[start..self.pos])
    }

    fn uint(&mut self) -> Result<usize> {
        let d = self.digits()?;
        d.parse().map_err(|_| self.err("integer out of range"))
    }

    fn index_list(&mut self) -> Result<Vec<usize>> {
        if !self.eat(b'(') {
            return Err(self.err("expected `(`"));
        }
        let mut idx = Vec::new();
        if !self.eat(b')') {
            loop {
                idx.push(self.uint()?);
                if self.eat(b')') {
                    break;
                }
                if !self.eat(b',') {
                    return Err(self.err("expected `,` or `)`"));
                }
            }
        }
        if idx.contains(&0) || idx.windows(2).any(|w| w[0] >= w[1]) {
            return Err(self.err("index set must be strictly increasing and 1-based"));
        }
        Ok(idx)
    }

    fn term(&mut self, sign: Q) -> Result<RawTerm> {
        let mut t = RawTerm { coeff: sign, vars: Vec::new(), wedge: None };
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let num = self.digits()?.to_string();
                    let lit = if self.eat(b'/') { format!("{num}/{}", self.digits()?) } else { num };
                    t.coeff *= parse_q(&lit)?;
                }
                Some(b'x') => {
                    self.pos += 1;
                    let v = self.uint()?;
                    if v == 0 {
                        return Err(self.err("variables are 1-based"));
                    }
                    let e = if self.eat(b'^') { self.uint()? as u32 } else { 1 };
                    t.vars.push((v, e));
                }
                Some(b'd') => {
                    let kind = if self.eat_str("dx") {
                        WedgeKind::Form
                    } else {
                        self.pos += 1;
                        WedgeKind::Field
                    };
                    if t.wedge.is_some() {
                        return Err(self.err("at most one wedge factor per term"));
                    }
                    t.wedge = Some((kind, self.index_list()?));
                }
                _ => return Err(self.err("expected a factor")),
            }
            if !self.eat(b'*') {
                return Ok(t);
            }
        }
    }
}

/// Parses a signed sum of monomial terms. The empty string and `0` give no terms.
pub fn parse_terms(src: &str) -> Result<Vec<RawTerm>> {
    let mut lx = Lexer { s: src.as_bytes(), pos: 0, src };
    let mut out = Vec::new();
    if lx.peek().is_none() {
        return Ok(out);
    }
    let mut sign = if lx.eat(b'-') {
        -Q::one()
    } else {
        lx.eat(b'+');
        Q::one()
    };
    loop {
        let t = lx.term(sign)?;
        if !t.coeff.is_zero() {
            out.push(t);
        }
        match lx.peek() {
            None => return Ok(out),
            Some(b'+') => {
                lx.pos += 1;
                sign = Q::one();
            }
            Some(b'-') => {
                lx.pos += 1;
                sign = -Q::one();
            }
            Some(_) => return Err(lx.err("expected `+` or `-`")),
        }
    }
}

/// Joins signed term strings as `a + b - c`.
pub fn join_terms(terms: Vec<(bool, String)>) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (neg, body)) in terms.into_iter().enumerate() {
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::qf;

    #[test]
    fn parses_fields_and_forms() {
        let t = parse_terms("x1*d(2,3) + 1/2*d(1)").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].vars, vec![(1, 1)]);
        assert_eq!(t[0].wedge, Some((WedgeKind::Field, vec![2, 3])));
        assert_eq!(t[1].coeff, qf(1, 2));
        let f = parse_terms("-x2^3*dx(1,3)").unwrap();
        assert_eq!(f[0].coeff, qf(-1, 1));
        assert_eq!(f[0].wedge, Some((WedgeKind::Form, vec![1, 3])));
        assert!(parse_terms("d(3,1)").is_err());
        assert!(parse_terms("x0").is_err());
        assert!(parse_terms("x1 x2").is_err());
        assert!(parse_terms("0").unwrap().is_empty());
    }
}
