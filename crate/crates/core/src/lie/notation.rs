//! Structure-equation notation such as `(0,0,e^{12},e^{13}+2e^{24})`.
//!
//! The `k`-th entry lists `de^k`. A coefficient `a` on `e^{ij}` means
//! `de^k(e_i, e_j) = a`, and with the convention `dα(x,y) = -α([x,y])` this
//! gives `c^k_{ij} = -a`. Thus `(0,0,e^{12})` has `[e_1,e_2] = -e_3`.
//! Indices of ten or more are written `e^{i,j}`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::str::FromStr;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::lie::LieAlgebra;
use crate::scalar::{Rational, Scalar};

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse { offset: self.pos, message: message.into() }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.err(format!("expected {s:?}")))
        }
    }

    fn digits(&mut self) -> &'a str {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        &self.src[start..self.pos]
    }

    fn integer(&mut self) -> Result<BigInt> {
        let d = self.digits();
        if d.is_empty() {
            return Err(self.err("expected digits"));
        }
        Ok(BigInt::from_str(d).unwrap())
    }
}

/// One term `coef·e^{ij}` of a differential.
fn parse_term(cur: &mut Cursor, dim_hint: Option<usize>) -> Result<(Scalar, usize, usize)> {
    let mut sign = 1;
    cur.skip_ws();
    loop {
        if cur.eat("+") {
        } else if cur.eat("-") || cur.eat("\u{2212}") {
            sign = -sign;
        } else {
            break;
        }
        cur.skip_ws();
    }
    let mut coef = Scalar::one();
    if cur.eat("\\frac{") {
        let n = cur.integer()?;
        cur.expect("}{")?;
        let d = cur.integer()?;
        cur.expect("}")?;
        if d == BigInt::from(0) {
            return Err(cur.err("zero denominator"));
        }
        coef = Scalar::Exact(Rational::new(n, d));
    } else if cur.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
        let start = cur.pos;
        cur.digits();
        if cur.eat(".") {
            cur.digits();
            let lit = &cur.src[start..cur.pos];
            coef = Scalar::from_str(lit).map_err(|_| Error::Parse { offset: start, message: "bad decimal".into() })?;
        } else {
            let n = BigInt::from_str(&cur.src[start..cur.pos]).unwrap();
            if cur.eat("/") {
                let d = cur.integer()?;
                if d == BigInt::from(0) {
                    return Err(cur.err("zero denominator"));
                }
                coef = Scalar::Exact(Rational::new(n, d));
            } else {
                coef = Scalar::Exact(Rational::from_integer(n));
            }
        }
    }
    cur.skip_ws();
    cur.eat("*");
    cur.skip_ws();
    let at = cur.pos;
    if !cur.eat("e^{") {
        return Err(cur.err("expected a term e^{ij}"));
    }
    let first = cur.digits();
    let (i, j) = if cur.eat(",") {
        let second = cur.digits();
        if first.is_empty() || second.is_empty() {
            return Err(cur.err("expected e^{i,j}"));
        }
        (first.parse::<usize>().unwrap(), second.parse::<usize>().unwrap())
    } else {
        if first.len() != 2 {
            return Err(Error::Parse {
                offset: at,
                message: format!("ambiguous index e^{{{first}}}; write e^{{i,j}} for indices of ten or more"),
            });
        }
        let b = first.as_bytes();
        ((b[0] - b'0') as usize, (b[1] - b'0') as usize)
    };
    cur.expect("}")?;
    if let Some(n) = dim_hint {
        for idx in [i, j] {
            if idx == 0 || idx > n {
                return Err(Error::Parse { offset: at, message: format!("index {idx} out of range 1..={n}") });
            }
        }
    }
    if i == j {
        return Err(Error::Parse { offset: at, message: format!("repeated index in e^{{{i}{j}}}") });
    }
    if sign < 0 {
        coef = -coef;
    }
    Ok((coef, i - 1, j - 1))
}

fn count_entries(text: &str) -> usize {
    let mut depth = 0i32;
    let mut count = 1;
    for ch in text.chars() {
        match ch {
            '{' => depth += 1,
            '}' => depth -= 1,
            ',' if depth == 0 => count += 1,
            _ => {}
        }
    }
    count
}

/// Parse a structure-equation string, verifying the Jacobi identity.
pub fn parse_structure(text: &str) -> Result<LieAlgebra> {
    let mut cur = Cursor { src: text, pos: 0 };
    cur.skip_ws();
    cur.expect("(")?;
    let inner_start = cur.pos;
    let close = text.rfind(')').ok_or_else(|| Error::Parse { offset: text.len(), message: "expected \")\"".into() })?;
    if close < inner_start {
        return Err(Error::Parse { offset: close, message: "unbalanced parentheses".into() });
    }
    let dim = count_entries(&text[inner_start..close]);
    let mut entries = Vec::new();
    for k in 0..dim {
        cur.skip_ws();
        let zero_here = cur.rest().starts_with('0') && {
            let after = cur.rest()[1..].trim_start();
            after.starts_with(',') || after.starts_with(')')
        };
        if zero_here {
            cur.bump();
        } else {
            loop {
                let (a, i, j) = parse_term(&mut cur, Some(dim))?;
                entries.push((i, j, k, -a));
                cur.skip_ws();
                match cur.peek() {
                    Some('+') | Some('-') | Some('\u{2212}') => continue,
                    _ => break,
                }
            }
        }
        cur.skip_ws();
        if k + 1 < dim {
            cur.expect(",")?;
        }
    }
    cur.skip_ws();
    cur.expect(")")?;
    cur.skip_ws();
    if cur.pos != text.len() {
        return Err(cur.err("trailing input"));
    }
    LieAlgebra::from_constants(dim, &entries)
}

impl FromStr for LieAlgebra {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_structure(s)
    }
}

/// Inverse of [`parse_structure`].
pub fn to_notation(l: &LieAlgebra) -> String {
    let n = l.dim();
    let wide = n >= 10;
    let mut parts = Vec::with_capacity(n);
    for k in 0..n {
        let mut s = String::new();
        for i in 0..n {
            for j in i + 1..n {
                let a = -l.constant(i, j, k);
                if a.is_zero() {
                    continue;
                }
                let neg = a.signum() < 0;
                let mag = a.abs();
                if s.is_empty() {
                    if neg {
                        s.push('-');
                    }
                } else {
                    s.push(if neg { '-' } else { '+' });
                }
                if !mag.is_one() || !mag.is_exact() {
                    s.push_str(&mag.to_string());
                }
                if wide {
                    s.push_str(&format!("e^{{{},{}}}", i + 1, j + 1));
                } else {
                    s.push_str(&format!("e^{{{}{}}}", i + 1, j + 1));
                }
            }
        }
        if s.is_empty() {
            s.push('0');
        }
        parts.push(s);
    }
    format!("({})", parts.join(","))
}
