//! Polynomial expressions in `x` and `T`.
//!
//! ```text
//! input  := [ "y^2" "=" ] expr
//! expr   := term { ("+" | "-") term }
//! term   := unary { ["*" | "/"] unary }        juxtaposition multiplies
//! unary  := ("-" | "+") unary | power
//! power  := atom [ "^" integer ]
//! atom   := integer | "x" | "T" | "(" expr ")"
//! ```
//!
//! Rationals are written `p/q`; division is only allowed by a nonzero
//! constant. Whitespace is ignored.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::qpoly::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "parse error at position {}: {}", self.position, self.message)
    }
}

/// Sparse polynomial in `x` and `T`, keyed by `(deg_x, deg_T)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Bivariate {
    terms: BTreeMap<(u32, u32), Rational>,
}

impl Bivariate {
    fn constant(c: Rational) -> Self {
        let mut b = Bivariate::default();
        b.insert((0, 0), c);
        b
    }

    fn monomial(dx: u32, dt: u32) -> Self {
        let mut b = Bivariate::default();
        b.insert((dx, dt), Rational::one());
        b
    }

    fn insert(&mut self, k: (u32, u32), c: Rational) {
        let e = self.terms.entry(k).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    fn add(mut self, o: &Bivariate) -> Bivariate {
        for (k, c) in &o.terms {
            self.insert(*k, c.clone());
        }
        self
    }

    fn neg(&self) -> Bivariate {
        Bivariate { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }

    fn mul(&self, o: &Bivariate) -> Bivariate {
        let mut out = Bivariate::default();
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &o.terms {
                out.insert((a1 + a2, b1 + b2), c1 * c2);
            }
        }
        out
    }

    fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), Rational> {
        &self.terms
    }

    pub fn max_deg_x(&self) -> u32 {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn max_deg_t(&self) -> u32 {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    X,
    T,
    Y,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eq,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().map(|c| c.1).collect();
                out.push((pos, Tok::Num(digits.parse().expect("ascii digits"))));
                continue;
            }
            'x' | 'X' => Tok::X,
            'T' | 't' => Tok::T,
            'y' | 'Y' => Tok::Y,
            '+' => Tok::Plus,
            '-' | '−' => Tok::Minus,
            '*' | '·' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '=' => Tok::Eq,
            other => {
                return Err(ParseError { position: pos, message: format!("unexpected character '{other}'") })
            }
        };
        out.push((pos, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { position: self.pos(), message: msg.into() })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Bivariate, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                acc = acc.add(&self.term()?);
            } else if self.eat(&Tok::Minus) {
                acc = acc.add(&self.term()?.neg());
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Bivariate, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.i += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.i += 1;
                    let at = self.pos();
                    let d = self.unary()?;
                    match d.as_constant() {
                        Some(c) if !c.is_zero() => acc = acc.mul(&Bivariate::constant(c.recip())),
                        Some(_) => {
                            return Err(ParseError { position: at, message: "division by zero".into() })
                        }
                        None => {
                            return Err(ParseError {
                                position: at,
                                message: "division is only allowed by a constant".into(),
                            })
                        }
                    }
                }
                Some(Tok::Num(_)) | Some(Tok::X) | Some(Tok::T) | Some(Tok::LParen) => {
                    acc = acc.mul(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Bivariate, ParseError> {
        if self.eat(&Tok::Minus) {
            return Ok(self.unary()?.neg());
        }
        if self.eat(&Tok::Plus) {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Bivariate, ParseError> {
        let base = self.atom()?;
        if self.eat(&Tok::Caret) {
            let e = match self.peek() {
                Some(Tok::Num(n)) => {
                    let n = n.clone();
                    self.i += 1;
                    u32::try_from(n).ok().filter(|&e| e <= 64)
                }
                _ => None,
            };
            let Some(e) = e else {
                return self.err("exponent must be a small non-negative integer");
            };
            let mut acc = Bivariate::constant(Rational::one());
            for _ in 0..e {
                acc = acc.mul(&base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Bivariate, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.i += 1;
                Ok(Bivariate::constant(Rational::from_integer(n)))
            }
            Some(Tok::X) => {
                self.i += 1;
                Ok(Bivariate::monomial(1, 0))
            }
            Some(Tok::T) => {
                self.i += 1;
                Ok(Bivariate::monomial(0, 1))
            }
            Some(Tok::LParen) => {
                self.i += 1;
                let e = self.expr()?;
                if !self.eat(&Tok::RParen) {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses a polynomial expression in `x` and `T`, optionally prefixed by
/// `y^2 =`.
pub fn parse_expression(src: &str) -> Result<Bivariate, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, i: 0, end: src.len() };
    if p.peek() == Some(&Tok::Y) {
        p.i += 1;
        let ok = match p.peek() {
            Some(Tok::Caret) => {
                p.i += 1;
                p.peek() == Some(&Tok::Num(BigInt::from(2)))
            }
            Some(Tok::Num(n)) => *n == BigInt::from(2),
            _ => false,
        };
        if !ok {
            return p.err("expected y^2");
        }
        p.i += 1;
        if !p.eat(&Tok::Eq) {
            return p.err("expected '='");
        }
    }
    let e = p.expr()?;
    if p.i != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}
