//! Scalar expressions with named parameters, e.g. `-3/16*(sqrt(249)+9)`.
//!
//! Rational arithmetic stays exact; `sqrt` and `cbrt` of non-perfect powers
//! and decimal literals switch to the approximate backend.

use std::collections::BTreeMap;

use nilsol_core::Scalar;
use thiserror::Error;

pub type Bindings = BTreeMap<String, Scalar>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{message} at offset {offset} in {input:?}")]
pub struct ExprError {
    pub input: String,
    pub offset: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

struct Parser<'a> {
    input: &'a str,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    vars: &'a Bindings,
}

fn tokenize(input: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = input.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (off, c) = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().map(|p| p.1).collect();
                out.push((off, Tok::Num(s)));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().map(|p| p.1).collect();
                out.push((off, Tok::Ident(s)));
            }
            '√' => {
                out.push((off, Tok::Ident("sqrt".into())));
                i += 1;
            }
            '\u{2212}' => {
                out.push((off, Tok::Op('-')));
                i += 1;
            }
            '+' | '-' | '*' | '/' | '^' | '(' | ')' => {
                out.push((off, Tok::Op(c)));
                i += 1;
            }
            _ => {
                return Err(ExprError { input: input.into(), offset: off, message: format!("unexpected character {c:?}") })
            }
        }
    }
    Ok(out)
}

impl<'a> Parser<'a> {
    fn err(&self, message: impl Into<String>) -> ExprError {
        let offset = self.toks.get(self.pos).map_or(self.input.len(), |t| t.0);
        ExprError { input: self.input.into(), offset, message: message.into() }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Scalar, ExprError> {
        let mut acc = self.product()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.product()?;
            } else if self.eat('-') {
                acc = &acc - &self.product()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Scalar, ExprError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                let d = self.unary()?;
                if d.is_zero() {
                    return Err(self.err("division by zero"));
                }
                acc = &acc / &d;
            } else if matches!(self.peek(), Some(Tok::Ident(_) | Tok::Op('('))) {
                // implicit product, as in `2g_3` or `3sqrt(2)`
                acc = &acc * &self.unary()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Scalar, ExprError> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Scalar, ExprError> {
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            let exp = match self.toks.get(self.pos) {
                Some((_, Tok::Num(s))) => s.parse::<i32>().map_err(|_| self.err("integer exponent expected"))?,
                _ => return Err(self.err("integer exponent expected")),
            };
            self.pos += 1;
            let exp = if neg { -exp } else { exp };
            if exp < 0 && base.is_zero() {
                return Err(self.err("division by zero"));
            }
            return Ok(base.powi(exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Scalar, ExprError> {
        let Some((_, tok)) = self.toks.get(self.pos).cloned() else {
            return Err(self.err("unexpected end of expression"));
        };
        self.pos += 1;
        match tok {
            Tok::Num(s) => s.parse::<Scalar>().map_err(|_| {
                self.pos -= 1;
                self.err("bad number")
            }),
            Tok::Op('(') => {
                let v = self.sum()?;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(v)
            }
            Tok::Ident(name) if name == "sqrt" || name == "cbrt" => {
                let arg = if self.eat('(') {
                    let v = self.sum()?;
                    if !self.eat(')') {
                        return Err(self.err("expected ')'"));
                    }
                    v
                } else {
                    self.power()?
                };
                if name == "cbrt" {
                    Ok(arg.cbrt())
                } else {
                    arg.sqrt().ok_or_else(|| self.err("square root of a negative number"))
                }
            }
            Tok::Ident(name) => self.vars.get(&name).cloned().ok_or_else(|| {
                self.pos -= 1;
                self.err(format!("unknown parameter {name:?}"))
            }),
            Tok::Op(c) => {
                self.pos -= 1;
                Err(self.err(format!("unexpected {c:?}")))
            }
        }
    }
}

/// Evaluate `input` with the given parameter values.
pub fn eval(input: &str, vars: &Bindings) -> Result<Scalar, ExprError> {
    let toks = tokenize(input)?;
    let mut p = Parser { input, toks, pos: 0, vars };
    let v = p.sum()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}
