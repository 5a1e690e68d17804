//! Expression parser for bivariate polynomials.
//!
//! Grammar (whitespace is insignificant, juxtaposition multiplies):
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/")? unary)*
//! unary  := ("+" | "-") unary | power
//! power  := atom (("^" | "**") exponent)?
//! atom   := number | identifier | "(" expr ")"
//! ```
//!
//! Exponents must be non-negative integer literals. Division is only
//! allowed by expressions that evaluate to a nonzero constant.

use std::collections::{BTreeSet, HashMap};
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::poly::BivariatePolynomial;

const MAX_DEGREE: u32 = 256;
const MAX_DEPTH: usize = 200;
const MAX_PRODUCT_WORK: usize = 1 << 20;

/// Recognised variable pairs; the first name is the base-plane coordinate.
pub const VARIABLE_PAIRS: [(&str, &str); 3] = [("x", "y"), ("z", "w"), ("t", "s")];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownIdentifier(String),
    NonIntegerExponent(String),
    NegativeExponent,
    NonConstantDivisor,
    DivisionByZero,
    TooLarge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the input.
    pub pos: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Syntax(m) => write!(f, "syntax error at {}: {m}", self.pos),
            ParseErrorKind::UnknownIdentifier(id) => {
                write!(f, "unknown identifier '{id}' at {}", self.pos)
            }
            ParseErrorKind::NonIntegerExponent(t) => {
                write!(f, "non-integer exponent '{t}' at {}", self.pos)
            }
            ParseErrorKind::NegativeExponent => write!(f, "negative exponent at {}", self.pos),
            ParseErrorKind::NonConstantDivisor => {
                write!(f, "division by a non-constant expression at {}", self.pos)
            }
            ParseErrorKind::DivisionByZero => write!(f, "division by zero at {}", self.pos),
            ParseErrorKind::TooLarge => write!(f, "expression degree too large at {}", self.pos),
        }
    }
}

impl std::error::Error for ParseError {}

/// Named constants available to expressions.
#[derive(Clone, Debug)]
pub struct Constants(HashMap<String, Complex64>);

impl Default for Constants {
    fn default() -> Self {
        let rho = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        let zeta = Complex64::from_polar(1.0, 2.0 * PI / 7.0);
        let mut m = HashMap::new();
        m.insert("i".into(), Complex64::new(0.0, 1.0));
        m.insert("I".into(), Complex64::new(0.0, 1.0));
        m.insert("pi".into(), Complex64::new(PI, 0.0));
        m.insert("rho".into(), rho);
        m.insert("rho2".into(), rho * rho);
        m.insert("zeta".into(), zeta);
        Self(m)
    }
}

impl Constants {
    pub fn empty() -> Self {
        Self(HashMap::new())
    }

    pub fn with(mut self, name: &str, value: Complex64) -> Self {
        self.0.insert(name.to_owned(), value);
        self
    }

    pub fn get(&self, name: &str) -> Option<Complex64> {
        self.0.get(name).copied()
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64, String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        match ch {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            b'-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            b'*' if bytes.get(i + 1) == Some(&b'*') => {
                out.push((i, Tok::Caret));
                i += 2;
            }
            b'*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            b'/' => {
                out.push((i, Tok::Slash));
                i += 1;
            }
            b'^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            b'(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // exponent part, only when followed by a digit (so "2e" stays 2*e)
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let s = &text[start..i];
                let v: f64 = s.parse().map_err(|_| ParseError {
                    pos: start,
                    kind: ParseErrorKind::Syntax(format!("malformed number '{s}'")),
                })?;
                out.push((start, Tok::Num(v, s.to_owned())));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_owned())));
            }
            _ => {
                let c = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError { pos: i, kind: ParseErrorKind::Syntax(format!("unexpected character '{c}'")) });
            }
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    vars: (&'a str, &'a str),
    constants: &'a Constants,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { pos: self.offset(), kind }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.err(ParseErrorKind::Syntax("expression nested too deeply".into())));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<BivariatePolynomial, ParseError> {
        self.enter()?;
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = &acc + &rhs;
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = &acc - &rhs;
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<BivariatePolynomial, ParseError> {
        let mut acc = self.unary()?;
        loop {
            let at = self.offset();
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = self.checked_mul(&acc, &rhs, at)?;
                }
                Tok::Slash => {
                    self.bump();
                    let rhs_at = self.offset();
                    let rhs = self.unary()?;
                    if rhs.degree_x() > 0 || rhs.degree_y() > 0 {
                        return Err(ParseError { pos: rhs_at, kind: ParseErrorKind::NonConstantDivisor });
                    }
                    let c = rhs.coeff(0, 0);
                    if c == Complex64::new(0.0, 0.0) {
                        return Err(ParseError { pos: rhs_at, kind: ParseErrorKind::DivisionByZero });
                    }
                    acc = acc.scale(c.inv());
                }
                // juxtaposition: "x^3 y", "2 i", "3(x+1)"
                Tok::Num(..) | Tok::Ident(_) | Tok::LParen => {
                    let rhs = self.power()?;
                    acc = self.checked_mul(&acc, &rhs, at)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn checked_mul(
        &self,
        a: &BivariatePolynomial,
        b: &BivariatePolynomial,
        at: usize,
    ) -> Result<BivariatePolynomial, ParseError> {
        if a.degree_x() + b.degree_x() > MAX_DEGREE
            || a.degree_y() + b.degree_y() > MAX_DEGREE
            || a.len().saturating_mul(b.len()) > MAX_PRODUCT_WORK
        {
            return Err(ParseError { pos: at, kind: ParseErrorKind::TooLarge });
        }
        Ok(a * b)
    }

    fn unary(&mut self) -> Result<BivariatePolynomial, ParseError> {
        self.enter()?;
        let out = match self.peek() {
            Tok::Minus => {
                self.bump();
                let p = self.unary()?;
                -&p
            }
            Tok::Plus => {
                self.bump();
                self.unary()?
            }
            _ => self.power()?,
        };
        self.depth -= 1;
        Ok(out)
    }

    fn power(&mut self) -> Result<BivariatePolynomial, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        let e = self.exponent()?;
        let dx = base.degree_x().saturating_mul(e);
        let dy = base.degree_y().saturating_mul(e);
        if dx > MAX_DEGREE || dy > MAX_DEGREE || (base.len() > 1 && e > MAX_DEGREE) {
            return Err(ParseError { pos: at, kind: ParseErrorKind::TooLarge });
        }
        let mut result = BivariatePolynomial::constant(Complex64::new(1.0, 0.0), self.vars);
        let mut sq = base;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = self.checked_mul(&result, &sq, at)?;
            }
            e >>= 1;
            if e > 0 {
                sq = self.checked_mul(&sq, &sq, at)?;
            }
        }
        Ok(result)
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        let at = self.offset();
        match self.bump().1 {
            Tok::Num(v, s) => integer_exponent(v, &s, at),
            Tok::Minus => Err(ParseError { pos: at, kind: ParseErrorKind::NegativeExponent }),
            Tok::Plus => self.exponent(),
            Tok::LParen => {
                let e = self.exponent()?;
                match self.bump() {
                    (_, Tok::RParen) => Ok(e),
                    (p, _) => {
                        Err(ParseError { pos: p, kind: ParseErrorKind::Syntax("expected ')' after exponent".into()) })
                    }
                }
            }
            Tok::Ident(id) => Err(ParseError { pos: at, kind: ParseErrorKind::NonIntegerExponent(id) }),
            _ => Err(ParseError { pos: at, kind: ParseErrorKind::Syntax("expected exponent".into()) }),
        }
    }

    fn atom(&mut self) -> Result<BivariatePolynomial, ParseError> {
        let (at, tok) = self.bump();
        match tok {
            Tok::Num(v, _) => Ok(BivariatePolynomial::constant(Complex64::new(v, 0.0), self.vars)),
            Tok::Ident(id) => {
                if id == self.vars.0 {
                    Ok(BivariatePolynomial::monomial(1, 0, Complex64::new(1.0, 0.0), self.vars))
                } else if id == self.vars.1 {
                    Ok(BivariatePolynomial::monomial(0, 1, Complex64::new(1.0, 0.0), self.vars))
                } else if let Some(c) = self.constants.get(&id) {
                    Ok(BivariatePolynomial::constant(c, self.vars))
                } else {
                    Err(ParseError { pos: at, kind: ParseErrorKind::UnknownIdentifier(id) })
                }
            }
            Tok::LParen => {
                let inner = self.expr()?;
                match self.bump() {
                    (_, Tok::RParen) => Ok(inner),
                    (p, _) => Err(ParseError { pos: p, kind: ParseErrorKind::Syntax("expected ')'".into()) }),
                }
            }
            Tok::End => Err(ParseError { pos: at, kind: ParseErrorKind::Syntax("unexpected end of input".into()) }),
            other => Err(ParseError {
                pos: at,
                kind: ParseErrorKind::Syntax(format!("unexpected token {}", describe(&other))),
            }),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Num(..) => "number",
        Tok::Ident(_) => "identifier",
        Tok::Plus => "'+'",
        Tok::Minus => "'-'",
        Tok::Star => "'*'",
        Tok::Slash => "'/'",
        Tok::Caret => "'^'",
        Tok::LParen => "'('",
        Tok::RParen => "')'",
        Tok::End => "end of input",
    }
}

fn integer_exponent(v: f64, s: &str, at: usize) -> Result<u32, ParseError> {
    if s.contains('.') || s.contains('e') || s.contains('E') || v.fract() != 0.0 {
        return Err(ParseError { pos: at, kind: ParseErrorKind::NonIntegerExponent(s.to_owned()) });
    }
    if v > u32::MAX as f64 {
        return Err(ParseError { pos: at, kind: ParseErrorKind::TooLarge });
    }
    Ok(v as u32)
}

/// Parse `text` over an explicit pair of variable names.
pub fn parse_polynomial_in(
    text: &str,
    vars: (&str, &str),
    constants: &Constants,
) -> Result<BivariatePolynomial, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, vars, constants, depth: 0 };
    let out = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.err(ParseErrorKind::Syntax(format!("unexpected {} after expression", describe(p.peek())))));
    }
    Ok(out)
}

/// Parse `text`, inferring the variable pair from the identifiers it uses.
///
/// Identifiers that are not constants must all belong to one of
/// [`VARIABLE_PAIRS`]; with no variables at all the pair defaults to `(x, y)`.
pub fn parse_polynomial(text: &str, constants: &Constants) -> Result<BivariatePolynomial, ParseError> {
    let toks = lex(text)?;
    let mut free: BTreeSet<&str> = BTreeSet::new();
    let mut first_pos: HashMap<&str, usize> = HashMap::new();
    for (pos, t) in &toks {
        if let Tok::Ident(id) = t {
            if constants.get(id).is_none() {
                free.insert(id.as_str());
                first_pos.entry(id.as_str()).or_insert(*pos);
            }
        }
    }
    let pair = VARIABLE_PAIRS.iter().find(|(a, b)| free.iter().all(|id| id == a || id == b)).copied();
    match pair {
        Some(vars) => parse_polynomial_in(text, vars, constants),
        None => {
            // report the earliest identifier that cannot belong to the best pair
            let best = VARIABLE_PAIRS
                .iter()
                .max_by_key(|(a, b)| free.iter().filter(|id| *id == a || *id == b).count())
                .copied()
                .unwrap_or(("x", "y"));
            let (id, pos) = free
                .iter()
                .filter(|id| **id != best.0 && **id != best.1)
                .map(|id| (*id, first_pos[id]))
                .min_by_key(|&(_, p)| p)
                .expect("some identifier is outside every pair");
            Err(ParseError { pos, kind: ParseErrorKind::UnknownIdentifier(id.to_owned()) })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn klein_affine_model() {
        let p = parse_polynomial("x^3*y + y^3 + x", &Constants::default()).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.coeff(3, 1), one());
        assert_eq!(p.coeff(0, 3), one());
        assert_eq!(p.coeff(1, 0), one());
        assert_eq!(p.vars(), ("x", "y"));
    }

    #[test]
    fn implicit_multiplication() {
        let a = parse_polynomial("x^3 y + y^3 + x", &Constants::default()).unwrap();
        let b = parse_polynomial("x^3*y + y^3 + x", &Constants::default()).unwrap();
        assert_eq!(a, b);
        let c = parse_polynomial("2i x", &Constants::default()).unwrap();
        assert_eq!(c.coeff(1, 0), Complex64::new(0.0, 2.0));
    }

    #[test]
    fn single_monomial() {
        let p = parse_polynomial("y", &Constants::default()).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.coeff(0, 1), one());
    }

    #[test]
    fn variables_inferred() {
        let p = parse_polynomial("s^7 - t*(t-1)^2", &Constants::default()).unwrap();
        assert_eq!(p.vars(), ("t", "s"));
        assert_eq!(p.degree_y(), 7);
        assert_eq!(p.degree_x(), 3);
    }

    #[test]
    fn division_by_constant() {
        let p = parse_polynomial("x/2 + y", &Constants::default()).unwrap();
        assert_eq!(p.coeff(1, 0), Complex64::new(0.5, 0.0));
        let e = parse_polynomial("1/x + y", &Constants::default()).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonConstantDivisor);
        let e = parse_polynomial("y/(1-1)", &Constants::default()).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DivisionByZero);
    }

    #[test]
    fn errors_report_position() {
        let e = parse_polynomial("x^3*y + q", &Constants::default()).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownIdentifier("q".into()));
        assert_eq!(e.pos, 8);

        let e = parse_polynomial("x^2.5 + y", &Constants::default()).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonIntegerExponent("2.5".into()));
        assert_eq!(e.pos, 2);

        let e = parse_polynomial("x^-1 + y", &Constants::default()).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NegativeExponent);

        let e = parse_polynomial("(x + y", &Constants::default()).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        assert_eq!(e.pos, 6);

        let e = parse_polynomial("x + $", &Constants::default()).unwrap_err();
        assert_eq!(e.pos, 4);

        let e = parse_polynomial("x y z", &Constants::default()).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownIdentifier("z".into()));
    }

    #[test]
    fn mixed_pairs_rejected() {
        let e = parse_polynomial("x + w", &Constants::default()).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::UnknownIdentifier(_)));
    }

    #[test]
    fn oversized_power_rejected() {
        let e = parse_polynomial("(x+y)^100000", &Constants::default()).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::TooLarge);
    }

    #[test]
    fn deep_nesting_rejected() {
        let s = format!("{}x{}", "(".repeat(5000), ")".repeat(5000));
        assert!(parse_polynomial(&s, &Constants::default()).is_err());
    }

    #[test]
    fn user_constants() {
        let k = Constants::default().with("a", Complex64::new(3.0, 0.0));
        let p = parse_polynomial("y^2 - a*x", &k).unwrap();
        assert_eq!(p.coeff(1, 0), Complex64::new(-3.0, 0.0));
    }
}
