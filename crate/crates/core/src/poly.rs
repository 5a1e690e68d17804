//! Bivariate polynomials with complex coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cjson;

/// A polynomial `f(x, y) = sum c_ij x^i y^j`.
///
/// Terms with a coefficient exactly equal to zero are never stored, so two
/// polynomials compare equal iff their term maps agree.
#[derive(Clone, Debug, PartialEq)]
pub struct BivariatePolynomial {
    terms: BTreeMap<(u32, u32), Complex64>,
    vars: (String, String),
}

impl BivariatePolynomial {
    pub fn zero(vars: (&str, &str)) -> Self {
        Self { terms: BTreeMap::new(), vars: (vars.0.to_owned(), vars.1.to_owned()) }
    }

    pub fn constant(c: Complex64, vars: (&str, &str)) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(0, 0, c);
        p
    }

    pub fn monomial(i: u32, j: u32, c: Complex64, vars: (&str, &str)) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(i, j, c);
        p
    }

    pub fn from_terms<I>(terms: I, vars: (&str, &str)) -> Self
    where
        I: IntoIterator<Item = ((u32, u32), Complex64)>,
    {
        let mut p = Self::zero(vars);
        for ((i, j), c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: Complex64) {
        let entry = self.terms.entry((i, j)).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if *entry == Complex64::new(0.0, 0.0) {
            self.terms.remove(&(i, j));
        }
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), Complex64> {
        &self.terms
    }

    pub fn coeff(&self, i: u32, j: u32) -> Complex64 {
        self.terms.get(&(i, j)).copied().unwrap_or_default()
    }

    pub fn vars(&self) -> (&str, &str) {
        (&self.vars.0, &self.vars.1)
    }

    pub fn with_vars(mut self, vars: (&str, &str)) -> Self {
        self.vars = (vars.0.to_owned(), vars.1.to_owned());
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree_x(&self) -> u32 {
        self.terms.keys().map(|&(i, _)| i).max().unwrap_or(0)
    }

    pub fn degree_y(&self) -> u32 {
        self.terms.keys().map(|&(_, j)| j).max().unwrap_or(0)
    }

    pub fn eval(&self, x: Complex64, y: Complex64) -> Complex64 {
        // Horner in y over Horner-in-x coefficients.
        let coeffs = self.coeffs_in_y(x);
        coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * y + c)
    }

    /// Coefficients of `f(x, .)` as a polynomial in y, lowest degree first.
    pub fn coeffs_in_y(&self, x: Complex64) -> Vec<Complex64> {
        let n = self.degree_y() as usize;
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        let mut by_j: Vec<Vec<(u32, Complex64)>> = vec![Vec::new(); n + 1];
        for (&(i, j), &c) in &self.terms {
            by_j[j as usize].push((i, c));
        }
        for (j, row) in by_j.iter().enumerate() {
            out[j] = eval_sparse(row, x);
        }
        out
    }

    /// Coefficients of `f(., y)` as a polynomial in x, lowest degree first.
    pub fn coeffs_in_x(&self, y: Complex64) -> Vec<Complex64> {
        let n = self.degree_x() as usize;
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        for (&(i, j), &c) in &self.terms {
            out[i as usize] += c * y.powu(j);
        }
        out
    }

    pub fn derivative_x(&self) -> Self {
        let mut p = Self { terms: BTreeMap::new(), vars: self.vars.clone() };
        for (&(i, j), &c) in &self.terms {
            if i > 0 {
                p.add_term(i - 1, j, c * i as f64);
            }
        }
        p
    }

    pub fn derivative_y(&self) -> Self {
        let mut p = Self { terms: BTreeMap::new(), vars: self.vars.clone() };
        for (&(i, j), &c) in &self.terms {
            if j > 0 {
                p.add_term(i, j - 1, c * j as f64);
            }
        }
        p
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|(&k, &c)| (k, c * s)), self.vars())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::constant(Complex64::new(1.0, 0.0), self.vars());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Total number of stored terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Stable textual form of the term map, used for content hashing.
    pub fn canonical_string(&self) -> String {
        let mut s = format!("{},{}:", self.vars.0, self.vars.1);
        for (&(i, j), c) in &self.terms {
            s.push_str(&format!("({i},{j})={:e},{:e};", c.re, c.im));
        }
        s
    }
}

fn eval_sparse(row: &[(u32, Complex64)], x: Complex64) -> Complex64 {
    row.iter().map(|&(i, c)| c * x.powu(i)).sum()
}

impl Add for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn add(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        let mut out = self.clone();
        for (&(i, j), &c) in &rhs.terms {
            out.add_term(i, j, c);
        }
        out
    }
}

impl Sub for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn sub(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        let mut out = self.clone();
        for (&(i, j), &c) in &rhs.terms {
            out.add_term(i, j, -c);
        }
        out
    }
}

impl Mul for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn mul(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        let mut acc: BTreeMap<(u32, u32), Complex64> = BTreeMap::new();
        for (&(i1, j1), &c1) in &self.terms {
            for (&(i2, j2), &c2) in &rhs.terms {
                *acc.entry((i1 + i2, j1 + j2)).or_default() += c1 * c2;
            }
        }
        acc.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        BivariatePolynomial { terms: acc, vars: self.vars.clone() }
    }
}

impl Neg for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn neg(self) -> BivariatePolynomial {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl fmt::Display for BivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j), c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}{:+}i)", c.re, c.im)?;
            if i > 0 {
                write!(f, "*{}^{}", self.vars.0, i)?;
            }
            if j > 0 {
                write!(f, "*{}^{}", self.vars.1, j)?;
            }
        }
        Ok(())
    }
}

/// JSON form: `{"vars": [x, y], "terms": [{"i":..,"j":..,"c":{"re":..,"im":..}}]}`.
#[derive(Serialize, Deserialize)]
struct TermJson {
    i: u32,
    j: u32,
    #[serde(with = "cjson")]
    c: Complex64,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    vars: (String, String),
    terms: Vec<TermJson>,
}

impl Serialize for BivariatePolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyJson {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(&(i, j), &c)| TermJson { i, j, c }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BivariatePolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pj = PolyJson::deserialize(d)?;
        Ok(Self::from_terms(pj.terms.into_iter().map(|t| ((t.i, t.j), t.c)), (&pj.vars.0, &pj.vars.1)))
    }
}

/// Evaluate a dense univariate polynomial (lowest degree first).
pub fn horner(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)
}

/// Value and first derivative of a dense univariate polynomial.
pub fn horner_d(coeffs: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let x = BivariatePolynomial::monomial(1, 0, c(1.0), ("x", "y"));
        let d = &x - &x;
        assert!(d.is_zero());
        assert_eq!(d.len(), 0);
    }

    #[test]
    fn binomial_square() {
        let x = BivariatePolynomial::monomial(1, 0, c(1.0), ("x", "y"));
        let y = BivariatePolynomial::monomial(0, 1, c(1.0), ("x", "y"));
        let s = (&x + &y).pow(2);
        assert_eq!(s.coeff(2, 0), c(1.0));
        assert_eq!(s.coeff(1, 1), c(2.0));
        assert_eq!(s.coeff(0, 2), c(1.0));
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn eval_and_derivatives() {
        // f = x^3 y + y^3 + x
        let f = BivariatePolynomial::from_terms([((3, 1), c(1.0)), ((0, 3), c(1.0)), ((1, 0), c(1.0))], ("x", "y"));
        let x = Complex64::new(0.3, -0.2);
        let y = Complex64::new(-1.1, 0.4);
        let direct = x.powu(3) * y + y.powu(3) + x;
        assert!((f.eval(x, y) - direct).norm() < 1e-14);
        let fy = f.derivative_y().eval(x, y);
        assert!((fy - (x.powu(3) + 3.0 * y * y)).norm() < 1e-14);
        let fx = f.derivative_x().eval(x, y);
        assert!((fx - (3.0 * x * x * y + 1.0)).norm() < 1e-14);
        assert_eq!(f.degree_x(), 3);
        assert_eq!(f.degree_y(), 3);
    }

    #[test]
    fn json_round_trip() {
        let f = BivariatePolynomial::from_terms([((7, 0), Complex64::new(0.5, -2.0)), ((0, 7), c(1.0))], ("z", "w"));
        let s = serde_json::to_string(&f).unwrap();
        let g: BivariatePolynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
    }
}
