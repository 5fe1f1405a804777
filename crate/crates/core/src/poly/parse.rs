//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' uint)?
//! base   := var | number | '(' expr ')'
//! number := int | int '/' int | int 'i' | 'i'
//! ```
//!
//! A complex constant `(a+bi)` is an ordinary parenthesized expression
//! built from the imaginary literal. The bare identifier `i` is the
//! imaginary unit unless it is a declared variable.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::SparsePoly;
use crate::scalar::{GaussRational, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken(String),
    UnexpectedEnd,
    UnknownVariable(String),
    NegativeExponent,
    FractionalExponent,
    ExponentTooLarge,
    ZeroDenominator,
    DuplicateVariable(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    /// Byte offset into the input.
    pub pos: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match &self.kind {
            ParseErrorKind::UnexpectedChar(c) => format!("unexpected character '{c}'"),
            ParseErrorKind::UnexpectedToken(t) => format!("unexpected {t}"),
            ParseErrorKind::UnexpectedEnd => "unexpected end of input".to_string(),
            ParseErrorKind::UnknownVariable(v) => format!("unknown variable '{v}'"),
            ParseErrorKind::NegativeExponent => "negative exponent".to_string(),
            ParseErrorKind::FractionalExponent => "fractional exponent".to_string(),
            ParseErrorKind::ExponentTooLarge => "exponent too large".to_string(),
            ParseErrorKind::ZeroDenominator => "zero denominator".to_string(),
            ParseErrorKind::DuplicateVariable(v) => format!("variable '{v}' declared twice"),
        };
        write!(f, "{what} at position {}", self.pos)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Rational(Rational),
    Imag(Rational),
    Decimal,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Int(n) => format!("number {n}"),
            Tok::Rational(q) => format!("number {q}"),
            Tok::Imag(q) => format!("imaginary literal {q}i"),
            Tok::Decimal => "decimal literal (write rationals as p/q)".to_string(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |pos, kind| ParseError { pos, kind };
    let digits = |mut j: usize| {
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        j
    };
    let ident_char = |b: u8| b.is_ascii_alphanumeric() || b == b'_';
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((start, Tok::Plus)),
            b'-' => out.push((start, Tok::Minus)),
            b'*' => out.push((start, Tok::Star)),
            b'^' => out.push((start, Tok::Caret)),
            b'(' => out.push((start, Tok::LParen)),
            b')' => out.push((start, Tok::RParen)),
            b'0'..=b'9' => {
                let end = digits(i);
                let num: BigInt = text[i..end].parse().expect("digits");
                i = end;
                let mut value = Rational::from_integer(num.clone());
                let mut is_int = true;
                if i < bytes.len() && bytes[i] == b'.' {
                    i = digits(i + 1);
                    out.push((start, Tok::Decimal));
                    continue;
                }
                // `p/q` is a single rational literal; there is no division.
                let mut j = i;
                while j < bytes.len() && bytes[j] == b' ' {
                    j += 1;
                }
                if j < bytes.len() && bytes[j] == b'/' {
                    let mut k = j + 1;
                    while k < bytes.len() && bytes[k] == b' ' {
                        k += 1;
                    }
                    let end = digits(k);
                    if end == k {
                        return Err(err(j, ParseErrorKind::UnexpectedChar('/')));
                    }
                    let den: BigInt = text[k..end].parse().expect("digits");
                    if den.is_zero() {
                        return Err(err(k, ParseErrorKind::ZeroDenominator));
                    }
                    value = Rational::new(num, den);
                    is_int = false;
                    i = end;
                }
                if i < bytes.len() && bytes[i] == b'i' && !(i + 1 < bytes.len() && ident_char(bytes[i + 1])) {
                    i += 1;
                    out.push((start, Tok::Imag(value)));
                } else if is_int {
                    out.push((start, Tok::Int(value.to_integer())));
                } else {
                    out.push((start, Tok::Rational(value)));
                }
                continue;
            }
            b if b.is_ascii_alphabetic() || b == b'_' => {
                let mut end = i;
                while end < bytes.len() && ident_char(bytes[end]) {
                    end += 1;
                }
                out.push((start, Tok::Ident(text[i..end].to_string())));
                i = end;
                continue;
            }
            _ => {
                let c = text[i..].chars().next().unwrap_or('?');
                return Err(err(start, ParseErrorKind::UnexpectedChar(c)));
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn fail<T>(&self, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos(), kind })
    }

    fn unexpected<T>(&self) -> Result<T, ParseError> {
        match self.peek() {
            Some(t) => self.fail(ParseErrorKind::UnexpectedToken(t.describe())),
            None => self.fail(ParseErrorKind::UnexpectedEnd),
        }
    }

    fn nvars(&self) -> usize {
        self.vars.len()
    }

    fn expr(&mut self) -> Result<SparsePoly, ParseError> {
        let negate = match self.peek() {
            Some(Tok::Minus) => {
                self.at += 1;
                true
            }
            Some(Tok::Plus) => {
                self.at += 1;
                false
            }
            _ => false,
        };
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<SparsePoly, ParseError> {
        let mut acc = self.factor()?;
        while let Some(Tok::Star) = self.peek() {
            self.at += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<SparsePoly, ParseError> {
        let base = self.base()?;
        if let Some(Tok::Caret) = self.peek() {
            self.at += 1;
            let exp = match self.peek() {
                Some(Tok::Int(n)) => match n.to_u32() {
                    Some(e) if e <= 1024 => e,
                    _ => return self.fail(ParseErrorKind::ExponentTooLarge),
                },
                Some(Tok::Minus) => return self.fail(ParseErrorKind::NegativeExponent),
                Some(Tok::Rational(_)) | Some(Tok::Decimal) => {
                    return self.fail(ParseErrorKind::FractionalExponent)
                }
                _ => return self.unexpected(),
            };
            self.at += 1;
            return Ok(base.pow(exp));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<SparsePoly, ParseError> {
        let n = self.nvars();
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return self.fail(ParseErrorKind::UnexpectedEnd),
        };
        let out = match tok {
            Tok::Ident(name) => match self.vars.iter().position(|v| *v == name) {
                Some(i) => SparsePoly::variable(n, i),
                None if name == "i" => SparsePoly::constant(n, GaussRational::imag_unit()),
                None => return self.fail(ParseErrorKind::UnknownVariable(name)),
            },
            Tok::Int(k) => SparsePoly::constant(n, GaussRational::real(Rational::from_integer(k))),
            Tok::Rational(q) => SparsePoly::constant(n, GaussRational::real(q)),
            Tok::Imag(q) => SparsePoly::constant(n, GaussRational::new(Rational::zero(), q)),
            Tok::LParen => {
                self.at += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.unexpected();
                }
                inner
            }
            _ => return self.unexpected(),
        };
        self.at += 1;
        Ok(out)
    }
}

/// Parses `text` as a polynomial in the ordered variables `vars`.
///
/// Like terms are merged and zero terms dropped, so the result is in
/// canonical form.
pub fn parse_poly(text: &str, vars: &[&str]) -> Result<SparsePoly, ParseError> {
    for (k, v) in vars.iter().enumerate() {
        if vars[..k].contains(v) {
            return Err(ParseError { pos: 0, kind: ParseErrorKind::DuplicateVariable(v.to_string()) });
        }
    }
    let toks = lex(text)?;
    let mut parser = Parser { toks, at: 0, end: text.len(), vars };
    let poly = parser.expr()?;
    if parser.at != parser.toks.len() {
        return parser.unexpected();
    }
    Ok(poly)
}
