//! Truncated formal power series in the polarized variables `(z, xi)`.
//!
//! `xi` stands for the conjugate variables treated as fully independent, so
//! a real-analytic identity becomes a formal identity with exact rational
//! coefficients. Truncation is by total degree in `(z, xi)` jointly.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::{format_rational, qmod_combine, QModReal, Rational, ScalarError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("series constant term must be zero")]
    NonzeroConstantTerm,
    #[error("series constant term must be one")]
    NonUnitConstantTerm,
    #[error("series disagree on the number of variables")]
    DimensionMismatch,
    #[error("weighted parts must share one truncation order")]
    OrderMismatch,
    #[error("weighted parts must share a scalar basis")]
    Scalar(#[from] ScalarError),
    #[error("weighted part list is empty")]
    EmptyParts,
}

/// Exponent pair of one term: `z^{z_exp} * xi^{xi_exp}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponents {
    pub z_exp: Vec<u32>,
    pub xi_exp: Vec<u32>,
}

impl Exponents {
    pub fn constant(n: usize) -> Self {
        Exponents {
            z_exp: vec![0; n],
            xi_exp: vec![0; n],
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.z_exp.iter().sum::<u32>() + self.xi_exp.iter().sum::<u32>()
    }

    /// Mixed terms carry at least one `z` and at least one `xi` factor.
    pub fn is_mixed(&self) -> bool {
        self.z_exp.iter().any(|&e| e > 0) && self.xi_exp.iter().any(|&e| e > 0)
    }

    fn add(&self, other: &Exponents) -> Exponents {
        Exponents {
            z_exp: self
                .z_exp
                .iter()
                .zip(&other.z_exp)
                .map(|(a, b)| a + b)
                .collect(),
            xi_exp: self
                .xi_exp
                .iter()
                .zip(&other.xi_exp)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

/// A truncated series with exact rational coefficients.
///
/// Invariants: no stored zero coefficients; every term has total degree at
/// most `order`. Terms are kept in lexicographic exponent order, so equal
/// series compare equal structurally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarizedSeries {
    n: usize,
    order: u32,
    terms: BTreeMap<Exponents, Rational>,
}

impl PolarizedSeries {
    pub fn zero(n: usize, order: u32) -> Self {
        PolarizedSeries {
            n,
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, order: u32, value: Rational) -> Self {
        let mut s = PolarizedSeries::zero(n, order);
        s.add_term(Exponents::constant(n), value);
        s
    }

    pub fn one(n: usize, order: u32) -> Self {
        PolarizedSeries::constant(n, order, Rational::one())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Exponents::constant(self.n))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn coefficient(&self, e: &Exponents) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    /// Add `value` to the coefficient of `e`, dropping the term above the
    /// truncation order or when the coefficient cancels.
    pub fn add_term(&mut self, e: Exponents, value: Rational) {
        debug_assert_eq!(e.z_exp.len(), self.n);
        debug_assert_eq!(e.xi_exp.len(), self.n);
        if value.is_zero() || e.total_degree() > self.order {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(value);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += value;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Re-truncate to a (usually lower) order.
    pub fn truncated(&self, order: u32) -> Self {
        let mut out = PolarizedSeries::zero(self.n, order);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        if self.n != other.n {
            return Err(SeriesError::DimensionMismatch);
        }
        let order = self.order.min(other.order);
        let mut out = self.truncated(order);
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return PolarizedSeries::zero(self.n, self.order);
        }
        PolarizedSeries {
            n: self.n,
            order: self.order,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn max_total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(Exponents::total_degree)
            .max()
            .unwrap_or(0)
    }

    /// Minimum total degree of a nonzero term, or `None` for the zero series.
    pub fn min_total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Exponents::total_degree).min()
    }
}

/// Exact product with all terms of total degree above `order` dropped.
pub fn series_mul(
    a: &PolarizedSeries,
    b: &PolarizedSeries,
    order: u32,
) -> Result<PolarizedSeries, SeriesError> {
    if a.n != b.n {
        return Err(SeriesError::DimensionMismatch);
    }
    let mut out = PolarizedSeries::zero(a.n, order);
    for (ea, ca) in &a.terms {
        let da = ea.total_degree();
        if da > order {
            continue;
        }
        for (eb, cb) in &b.terms {
            if da + eb.total_degree() > order {
                continue;
            }
            out.add_term(ea.add(eb), ca * cb);
        }
    }
    Ok(out)
}

/// `s^k` truncated at `order`.
pub fn series_pow(s: &PolarizedSeries, k: u32, order: u32) -> Result<PolarizedSeries, SeriesError> {
    let mut acc = PolarizedSeries::one(s.n, order);
    for _ in 0..k {
        acc = series_mul(&acc, s, order)?;
    }
    Ok(acc)
}

/// `log(1 + s) = sum_{k>=1} (-1)^{k+1} s^k / k`, exact through `order`.
///
/// Requires a vanishing constant term, so each power raises the minimum
/// degree and the sum is finite.
pub fn series_log1p(s: &PolarizedSeries, order: u32) -> Result<PolarizedSeries, SeriesError> {
    if !s.constant_term().is_zero() {
        return Err(SeriesError::NonzeroConstantTerm);
    }
    let mut acc = PolarizedSeries::zero(s.n, order);
    let mut power = PolarizedSeries::one(s.n, order);
    let mut sign = Rational::one();
    for k in 1..=order.max(1) {
        power = series_mul(&power, s, order)?;
        if power.is_zero() {
            break;
        }
        let coeff = &sign / Rational::from_integer(k.into());
        acc = acc.add(&power.scale(&coeff))?;
        sign = -sign;
    }
    Ok(acc)
}

/// `exp(s) = sum_{k>=0} s^k / k!` for a series with zero constant term.
pub fn series_exp(s: &PolarizedSeries, order: u32) -> Result<PolarizedSeries, SeriesError> {
    if !s.constant_term().is_zero() {
        return Err(SeriesError::NonzeroConstantTerm);
    }
    let mut acc = PolarizedSeries::one(s.n, order);
    let mut power = PolarizedSeries::one(s.n, order);
    let mut factorial = Rational::one();
    for k in 1..=order.max(1) {
        power = series_mul(&power, s, order)?;
        if power.is_zero() {
            break;
        }
        factorial *= Rational::from_integer(k.into());
        acc = acc.add(&power.scale(&factorial.recip()))?;
    }
    Ok(acc)
}

/// Keep exactly the terms whose `z` part and `xi` part are both nonzero;
/// the pluriharmonic remainder (pure-z, pure-xi, constant) is dropped.
pub fn mixed_part(s: &PolarizedSeries) -> PolarizedSeries {
    let mut out = PolarizedSeries::zero(s.n, s.order);
    for (e, c) in &s.terms {
        if e.is_mixed() {
            out.add_term(e.clone(), c.clone());
        }
    }
    out
}

fn derivative(s: &PolarizedSeries, var: usize, with_respect_to_xi: bool) -> PolarizedSeries {
    let order = s.order.saturating_sub(1);
    let mut out = PolarizedSeries::zero(s.n, order);
    for (e, c) in &s.terms {
        let exp = if with_respect_to_xi {
            e.xi_exp[var]
        } else {
            e.z_exp[var]
        };
        if exp == 0 {
            continue;
        }
        let mut e2 = e.clone();
        if with_respect_to_xi {
            e2.xi_exp[var] -= 1;
        } else {
            e2.z_exp[var] -= 1;
        }
        out.add_term(e2, c * Rational::from_integer(exp.into()));
    }
    out
}

/// The mixed Hessian: entry `(a, b)` is `d^2 s / dz_a dxi_b`, truncated at
/// order `D - 2`.
pub fn ddbar(s: &PolarizedSeries) -> Vec<Vec<PolarizedSeries>> {
    (0..s.n)
        .map(|a| {
            let dz = derivative(s, a, false);
            (0..s.n).map(|b| derivative(&dz, b, true)).collect()
        })
        .collect()
}

/// A formal sum of weighted log-factors `sum_i weight_i * log(series_i)`.
#[derive(Debug, Clone)]
pub struct SeriesWithWeights {
    pub parts: Vec<(QModReal, PolarizedSeries)>,
}

impl SeriesWithWeights {
    pub fn new(parts: Vec<(QModReal, PolarizedSeries)>) -> Self {
        SeriesWithWeights { parts }
    }
}

/// Mixed-part residual of `sum_i weight_i * log(series_i)`, grouped by
/// basis coordinate.
///
/// Each factor must have constant term 1. The returned list holds one
/// rational-coefficient series per coordinate of the weights' basis; the
/// identity holds to the working order exactly when every entry is zero.
pub fn weighted_log_residual(
    parts: &SeriesWithWeights,
) -> Result<Vec<PolarizedSeries>, SeriesError> {
    let first = parts.parts.first().ok_or(SeriesError::EmptyParts)?;
    let basis = first.0.basis().clone();
    let n = first.1.n();
    let order = first.1.order();
    for (w, s) in &parts.parts {
        if s.n() != n {
            return Err(SeriesError::DimensionMismatch);
        }
        if s.order() != order {
            return Err(SeriesError::OrderMismatch);
        }
        if !s.constant_term().is_one() {
            return Err(SeriesError::NonUnitConstantTerm);
        }
        qmod_combine(
            &[Rational::one(), Rational::one()],
            &[first.0.clone(), w.clone()],
        )?;
    }
    let mut residuals = vec![PolarizedSeries::zero(n, order); basis.len()];
    for (w, s) in &parts.parts {
        let one = PolarizedSeries::one(n, order);
        let log = series_log1p(&s.sub(&one)?, order)?;
        for (coord, res) in w.coords().iter().zip(residuals.iter_mut()) {
            if coord.is_zero() {
                continue;
            }
            *res = res.add(&log.scale(coord))?;
        }
    }
    Ok(residuals.iter().map(mixed_part).collect())
}

impl fmt::Display for PolarizedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut factors = Vec::new();
            if !(c.is_one() && e.total_degree() > 0) {
                factors.push(format_rational(c));
            }
            for (i, &p) in e.z_exp.iter().enumerate() {
                match p {
                    0 => {}
                    1 => factors.push(format!("z{}", i + 1)),
                    _ => factors.push(format!("z{}^{}", i + 1, p)),
                }
            }
            for (i, &p) in e.xi_exp.iter().enumerate() {
                match p {
                    0 => {}
                    1 => factors.push(format!("xi{}", i + 1)),
                    _ => factors.push(format!("xi{}^{}", i + 1, p)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int, QBasis};

    /// `1 + z_i * xi_i` in one variable.
    fn one_plus_zxi(order: u32) -> PolarizedSeries {
        let mut s = PolarizedSeries::one(1, order);
        s.add_term(
            Exponents {
                z_exp: vec![1],
                xi_exp: vec![1],
            },
            rat_int(1),
        );
        s
    }

    fn e1(z: u32, xi: u32) -> Exponents {
        Exponents {
            z_exp: vec![z],
            xi_exp: vec![xi],
        }
    }

    #[test]
    fn mul_square() {
        let s = one_plus_zxi(4);
        let sq = series_mul(&s, &s, 4).unwrap();
        let mut expect = PolarizedSeries::one(1, 4);
        expect.add_term(e1(1, 1), rat_int(2));
        expect.add_term(e1(2, 2), rat_int(1));
        assert_eq!(sq, expect);
    }

    #[test]
    fn mul_absorbing_zero() {
        let s = one_plus_zxi(4);
        let z = PolarizedSeries::zero(1, 4);
        assert!(series_mul(&s, &z, 4).unwrap().is_zero());
    }

    #[test]
    fn mul_two_variables() {
        let mut a = PolarizedSeries::one(2, 4);
        a.add_term(
            Exponents {
                z_exp: vec![1, 0],
                xi_exp: vec![1, 0],
            },
            rat_int(1),
        );
        let mut b = PolarizedSeries::one(2, 4);
        b.add_term(
            Exponents {
                z_exp: vec![0, 1],
                xi_exp: vec![0, 1],
            },
            rat_int(1),
        );
        let p = series_mul(&a, &b, 4).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(
            p.coefficient(&Exponents {
                z_exp: vec![1, 1],
                xi_exp: vec![1, 1],
            }),
            rat_int(1)
        );
    }

    #[test]
    fn log_single_term() {
        let mut t = PolarizedSeries::zero(1, 6);
        t.add_term(e1(1, 1), rat_int(1));
        let log = series_log1p(&t, 6).unwrap();
        let mut expect = PolarizedSeries::zero(1, 6);
        expect.add_term(e1(1, 1), rat_int(1));
        expect.add_term(e1(2, 2), rat(-1, 2));
        expect.add_term(e1(3, 3), rat(1, 3));
        assert_eq!(log, expect);
    }

    #[test]
    fn log_of_zero() {
        let z = PolarizedSeries::zero(1, 6);
        assert!(series_log1p(&z, 6).unwrap().is_zero());
    }

    #[test]
    fn log_of_square_doubles() {
        // 1 + s = (1 + z*xi)^2
        let mut s = PolarizedSeries::zero(1, 6);
        s.add_term(e1(1, 1), rat_int(2));
        s.add_term(e1(2, 2), rat_int(1));
        let lhs = series_log1p(&s, 6).unwrap();
        let mut t = PolarizedSeries::zero(1, 6);
        t.add_term(e1(1, 1), rat_int(1));
        let rhs = series_log1p(&t, 6).unwrap().scale(&rat_int(2));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn log_rejects_constant_term() {
        let s = PolarizedSeries::one(1, 4);
        assert_eq!(series_log1p(&s, 4), Err(SeriesError::NonzeroConstantTerm));
    }

    #[test]
    fn mixed_part_drops_pure_terms() {
        let mut s = PolarizedSeries::zero(1, 4);
        s.add_term(e1(1, 0), rat_int(1));
        s.add_term(e1(0, 1), rat_int(1));
        s.add_term(e1(1, 1), rat_int(3));
        let m = mixed_part(&s);
        assert_eq!(m.len(), 1);
        assert_eq!(m.coefficient(&e1(1, 1)), rat_int(3));
    }

    #[test]
    fn mixed_part_of_pure_z_is_zero() {
        let mut s = PolarizedSeries::zero(1, 4);
        s.add_term(e1(2, 0), rat_int(5));
        s.add_term(e1(1, 0), rat(-1, 3));
        assert!(mixed_part(&s).is_zero());
    }

    #[test]
    fn log_of_split_product_has_no_mixed_part() {
        // log((1+z)(1+xi)) splits into pure parts.
        let mut s = PolarizedSeries::zero(1, 4);
        s.add_term(e1(1, 0), rat_int(1));
        s.add_term(e1(0, 1), rat_int(1));
        s.add_term(e1(1, 1), rat_int(1));
        let log = series_log1p(&s, 4).unwrap();
        assert!(mixed_part(&log).is_zero());
    }

    #[test]
    fn ddbar_single_term() {
        let mut s = PolarizedSeries::zero(1, 4);
        s.add_term(e1(1, 1), rat_int(1));
        let m = ddbar(&s);
        assert_eq!(m[0][0], PolarizedSeries::one(1, 2));
    }

    #[test]
    fn ddbar_log_one_plus_zxi() {
        let s = one_plus_zxi(6);
        let log = series_log1p(&s.sub(&PolarizedSeries::one(1, 6)).unwrap(), 6).unwrap();
        let m = ddbar(&log);
        let mut expect = PolarizedSeries::one(1, 4);
        expect.add_term(e1(1, 1), rat_int(-2));
        expect.add_term(e1(2, 2), rat_int(3));
        assert_eq!(m[0][0], expect);
    }

    #[test]
    fn ddbar_kills_pure_series() {
        let mut s = PolarizedSeries::zero(1, 4);
        s.add_term(e1(3, 0), rat_int(2));
        let m = ddbar(&s);
        assert!(m[0][0].is_zero());
    }

    #[test]
    fn residual_exact_cancellation() {
        let b = QBasis::rational();
        let s = one_plus_zxi(6);
        let sq = series_mul(&s, &s, 6).unwrap();
        let parts = SeriesWithWeights::new(vec![
            (QModReal::from_rational(&b, rat_int(2)), s),
            (QModReal::from_rational(&b, rat_int(-1)), sq),
        ]);
        let res = weighted_log_residual(&parts).unwrap();
        assert!(res.iter().all(PolarizedSeries::is_zero));
    }

    #[test]
    fn residual_nonzero_single_factor() {
        let b = QBasis::rational();
        let parts = SeriesWithWeights::new(vec![(
            QModReal::from_rational(&b, rat_int(1)),
            one_plus_zxi(6),
        )]);
        let res = weighted_log_residual(&parts).unwrap();
        assert!(!res[0].is_zero());
        assert_eq!(res[0].coefficient(&e1(1, 1)), rat_int(1));
    }

    #[test]
    fn exp_log_round_trip() {
        let mut s = PolarizedSeries::zero(2, 6);
        s.add_term(
            Exponents {
                z_exp: vec![1, 0],
                xi_exp: vec![0, 1],
            },
            rat(2, 3),
        );
        s.add_term(
            Exponents {
                z_exp: vec![0, 1],
                xi_exp: vec![1, 0],
            },
            rat(-1, 2),
        );
        let log = series_log1p(&s, 6).unwrap();
        let back = series_exp(&log, 6).unwrap();
        let expect = PolarizedSeries::one(2, 6).add(&s).unwrap();
        assert_eq!(back, expect);
    }

    #[test]
    fn zero_variable_series_reduce_to_scalars() {
        let a = PolarizedSeries::constant(0, 4, rat(3, 2));
        let b = PolarizedSeries::constant(0, 4, rat(-1, 2));
        let p = series_mul(&a, &b, 4).unwrap();
        assert_eq!(p.constant_term(), rat(-3, 4));
        assert!(mixed_part(&p).is_zero());
    }
}
