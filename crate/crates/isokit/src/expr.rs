//! Recursive-descent parser for polynomial expressions with exact rational
//! literals, such as `Y^2 - z` or `(1 + z1*xi1)^2`.
//!
//! Expressions are lowered either to a bivariate `(z, Y)` polynomial or to
//! a polarized polynomial in `(z_1..z_n, xi_1..xi_n)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::puiseux::qpoly::QPoly;
use crate::puiseux::{AlgebraicFunction, PuiseuxError};
use crate::scalar::Rational;
use crate::series::{Exponents, PolarizedSeries};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("syntax error at column {column}: expected {expected}")]
    Syntax { column: usize, expected: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("division by a non-constant or zero expression")]
    BadDivision,
    #[error("exponent must be a nonnegative integer literal")]
    BadExponent,
    #[error("expression uses variables outside the requested context: {0}")]
    WrongContext(String),
    #[error(transparent)]
    Algebraic(#[from] PuiseuxError),
}

/// Sparse polynomial over named variables, the parser's output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedPoly {
    pub vars: Vec<String>,
    /// exponent vector (aligned with `vars`) -> coefficient
    pub terms: BTreeMap<Vec<u32>, Rational>,
}

impl NamedPoly {
    fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        NamedPoly {
            vars: Vec::new(),
            terms,
        }
    }

    fn variable(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![1], Rational::one());
        NamedPoly {
            vars: vec![name.to_string()],
            terms,
        }
    }

    fn align(&self, vars: &[String]) -> BTreeMap<Vec<u32>, Rational> {
        let index: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v).expect("aligned superset"))
            .collect();
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut out = vec![0u32; vars.len()];
                for (k, &exp) in e.iter().enumerate() {
                    out[index[k]] = exp;
                }
                (out, c.clone())
            })
            .collect()
    }

    fn merge_vars(a: &NamedPoly, b: &NamedPoly) -> Vec<String> {
        let mut vars = a.vars.clone();
        for v in &b.vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        vars.sort();
        vars
    }

    fn add(&self, other: &Self) -> Self {
        let vars = Self::merge_vars(self, other);
        let mut terms = self.align(&vars);
        for (e, c) in other.align(&vars) {
            let slot = terms.entry(e).or_insert_with(Rational::zero);
            *slot += c;
        }
        terms.retain(|_, c| !c.is_zero());
        NamedPoly { vars, terms }
    }

    fn neg(&self) -> Self {
        NamedPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c.clone()))
                .collect(),
        }
    }

    fn mul(&self, other: &Self) -> Self {
        let vars = Self::merge_vars(self, other);
        let a = self.align(&vars);
        let b = other.align(&vars);
        let mut terms: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (ea, ca) in &a {
            for (eb, cb) in &b {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let slot = terms.entry(e).or_insert_with(Rational::zero);
                *slot += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        NamedPoly { vars, terms }
    }

    fn pow(&self, k: u32) -> Self {
        let mut acc = NamedPoly::constant(Rational::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    fn as_constant(&self) -> Option<Rational> {
        if self.terms.is_empty() {
            return Some(Rational::zero());
        }
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            if e.iter().all(|&x| x == 0) {
                return Some(c.clone());
            }
        }
        None
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn error(&self, expected: &str) -> ExprError {
        ExprError::Syntax {
            column: self.pos + 1,
            expected: expected.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse_expr(&mut self) -> Result<NamedPoly, ExprError> {
        let mut acc = self.parse_term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.parse_term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.add(&self.parse_term()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<NamedPoly, ExprError> {
        let mut acc = self.parse_factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.parse_factor()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let divisor = self.parse_factor()?;
                    let c = divisor.as_constant().ok_or(ExprError::BadDivision)?;
                    if c.is_zero() {
                        return Err(ExprError::BadDivision);
                    }
                    acc = acc.mul(&NamedPoly::constant(c.recip()));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<NamedPoly, ExprError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.parse_factor()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.parse_factor()
            }
            _ => {
                let base = self.parse_atom()?;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    let k = self.parse_uint()?;
                    Ok(base.pow(k))
                } else {
                    Ok(base)
                }
            }
        }
    }

    fn parse_atom(&mut self) -> Result<NamedPoly, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.parse_expr()?;
                if !self.eat(b')') {
                    return Err(self.error("closing parenthesis"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.parse_uint_big()?;
                Ok(NamedPoly::constant(Rational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self
                    .src
                    .get(self.pos)
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos])
                    .expect("ascii")
                    .to_string();
                Ok(NamedPoly::variable(&name))
            }
            _ => Err(self.error("number, variable or parenthesized expression")),
        }
    }

    fn parse_uint(&mut self) -> Result<u32, ExprError> {
        let n = self.parse_uint_big().map_err(|_| ExprError::BadExponent)?;
        u32::try_from(n).map_err(|_| ExprError::BadExponent)
    }

    fn parse_uint_big(&mut self) -> Result<BigInt, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("digits"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digits parse"))
    }
}

/// Parse an expression into a sparse polynomial over its named variables.
pub fn parse_poly(src: &str) -> Result<NamedPoly, ExprError> {
    let mut p = Parser::new(src);
    let poly = p.parse_expr()?;
    if p.peek().is_some() {
        return Err(p.error("end of expression"));
    }
    Ok(poly)
}

/// Lower to a defining polynomial in the variables `z` and `Y`.
pub fn parse_algebraic(src: &str) -> Result<AlgebraicFunction, ExprError> {
    let poly = parse_poly(src)?;
    let mut zi = None;
    let mut yi = None;
    for (k, v) in poly.vars.iter().enumerate() {
        match v.as_str() {
            "z" | "z1" => zi = Some(k),
            "Y" | "y" => yi = Some(k),
            other => return Err(ExprError::WrongContext(other.to_string())),
        }
    }
    let mut coeffs: Vec<QPoly> = Vec::new();
    for (e, c) in &poly.terms {
        let zdeg = zi.map(|i| e[i] as usize).unwrap_or(0);
        let ydeg = yi.map(|i| e[i] as usize).unwrap_or(0);
        if coeffs.len() <= ydeg {
            coeffs.resize(ydeg + 1, QPoly::zero());
        }
        let mut cs: Vec<Rational> = coeffs[ydeg].coeffs().to_vec();
        if cs.len() <= zdeg {
            cs.resize(zdeg + 1, Rational::zero());
        }
        cs[zdeg] += c;
        coeffs[ydeg] = QPoly::new(cs);
    }
    Ok(AlgebraicFunction::new(coeffs)?)
}

fn polarized_var(name: &str) -> Option<(bool, usize)> {
    let (is_xi, rest) = if let Some(r) = name.strip_prefix("xi") {
        (true, r)
    } else {
        let r = name.strip_prefix('z')?;
        (false, r)
    };
    if rest.is_empty() {
        return Some((is_xi, 0));
    }
    rest.parse::<usize>()
        .ok()
        .filter(|&i| i >= 1)
        .map(|i| (is_xi, i - 1))
}

/// Lower to a polarized series in `n` variables, truncated at `order`.
pub fn parse_polarized(src: &str, order: u32) -> Result<PolarizedSeries, ExprError> {
    let poly = parse_poly(src)?;
    let mut n = 0usize;
    let mut mapping = Vec::new();
    for v in &poly.vars {
        let (is_xi, idx) = polarized_var(v).ok_or_else(|| ExprError::WrongContext(v.clone()))?;
        n = n.max(idx + 1);
        mapping.push((is_xi, idx));
    }
    let n = n.max(1);
    let mut s = PolarizedSeries::zero(n, order);
    for (e, c) in &poly.terms {
        let mut z_exp = vec![0u32; n];
        let mut xi_exp = vec![0u32; n];
        for (k, &exp) in e.iter().enumerate() {
            let (is_xi, idx) = mapping[k];
            if is_xi {
                xi_exp[idx] += exp;
            } else {
                z_exp[idx] += exp;
            }
        }
        s.add_term(Exponents { z_exp, xi_exp }, c.clone());
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    #[test]
    fn parses_defining_polynomial() {
        let f = parse_algebraic("Y^2 - z").unwrap();
        assert_eq!(f.degree(), 2);
        assert_eq!(f.coeff(0), &QPoly::from_i64(&[0, -1]));
        assert_eq!(f.coeff(2), &QPoly::from_i64(&[1]));
    }

    #[test]
    fn parses_polarized_square() {
        let s = parse_polarized("(1 + z1*xi1)^2", 6).unwrap();
        assert_eq!(s.constant_term(), rat_int(1));
        assert_eq!(
            s.coefficient(&Exponents {
                z_exp: vec![1],
                xi_exp: vec![1],
            }),
            rat_int(2)
        );
    }

    #[test]
    fn rational_constants_via_division() {
        let s = parse_polarized("1/2 + 3/4*z1*xi1", 4).unwrap();
        assert_eq!(s.constant_term(), rat(1, 2));
    }

    #[test]
    fn rejects_trailing_garbage() {
        assert!(matches!(parse_poly("1 + )"), Err(ExprError::Syntax { .. })));
        assert!(matches!(
            parse_poly("z^"),
            Err(ExprError::Syntax { .. }) | Err(ExprError::BadExponent)
        ));
    }

    #[test]
    fn rejects_polynomial_division() {
        assert_eq!(parse_poly("1/(1+z)").unwrap_err(), ExprError::BadDivision);
        assert_eq!(parse_poly("z/0").unwrap_err(), ExprError::BadDivision);
    }

    #[test]
    fn variable_aliases() {
        let s = parse_polarized("z*xi", 4).unwrap();
        assert_eq!(s.n(), 1);
        let f = parse_algebraic("y^2 - z1").unwrap();
        assert_eq!(f.degree(), 2);
    }
}
