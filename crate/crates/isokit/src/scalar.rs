//! Exact scalars: rationals, and real numbers presented as rational
//! coordinates over a declared basis of real constants.
//!
//! A [`QBasis`] fixes finitely many real constants (the constant `1`, square
//! roots of positive rationals); a [`QModReal`] is a rational coordinate
//! vector over such a basis. Equality and the zero test are coordinate-wise
//! and exact. Sign determination refines interval enclosures of the basis
//! entries until the interval excludes zero; it trusts the declared
//! independence of the basis and surfaces a budget error when refinement
//! cannot separate a (declared-)nonzero value from zero.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = num_rational::BigRational;

/// Convenience constructor used pervasively in tests and literals.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("elements disagree on their scalar basis")]
    MixedBasis,
    #[error("coefficient and element lists must have equal length >= 1")]
    LengthMismatch,
    #[error("coordinate count {got} does not match basis length {expected}")]
    CoordCount { expected: usize, got: usize },
    #[error("enclosure refinement budget of {cap} steps exceeded; the declared basis entries are probably not independent")]
    RefinementBudgetExceeded { cap: u32 },
    #[error("basis must start with the constant 1 (unit rule)")]
    MissingUnitEntry,
    #[error("duplicate basis label `{0}`")]
    DuplicateLabel(String),
    #[error("sqrt rule requires a positive rational, got {0}")]
    NonPositiveRadicand(String),
    #[error("invalid rational literal `{0}`")]
    InvalidRational(String),
}

/// Parse a rational written as `p` or `p/q` with `q != 0`.
pub fn parse_rational(s: &str) -> Result<Rational, ScalarError> {
    let bad = || ScalarError::InvalidRational(s.to_string());
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let n = BigInt::from_str(num).map_err(|_| bad())?;
    let d = BigInt::from_str(den).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Format a rational as `p` or `p/q` in lowest terms.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
    Zero,
}

/// Rule used to tighten the enclosure of one basis entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Refiner {
    /// The constant 1, enclosure `[1, 1]`.
    Unit,
    /// `sqrt(q)` for a positive rational `q`.
    Sqrt(Rational),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisEntry {
    pub label: String,
    pub refiner: Refiner,
    /// Initial enclosure `[lo, hi]` with `lo <= value <= hi`.
    pub enclosure: (Rational, Rational),
}

impl BasisEntry {
    fn new(label: &str, refiner: Refiner) -> Result<Self, ScalarError> {
        let enclosure = match &refiner {
            Refiner::Unit => (Rational::one(), Rational::one()),
            Refiner::Sqrt(q) => {
                if !q.is_positive() {
                    return Err(ScalarError::NonPositiveRadicand(format_rational(q)));
                }
                let one = Rational::one();
                if *q >= one {
                    (one, q.clone())
                } else {
                    (q.clone(), one)
                }
            }
        };
        Ok(BasisEntry {
            label: label.to_string(),
            refiner,
            enclosure,
        })
    }
}

/// An ordered basis of real constants over which scalars are expressed.
///
/// The first entry is always the constant 1. Linear independence over the
/// rationals is declared by the caller, recorded, and never verified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QBasis {
    entries: Vec<BasisEntry>,
}

impl QBasis {
    pub fn new(entries: Vec<(String, Refiner)>) -> Result<Arc<Self>, ScalarError> {
        match entries.first() {
            Some((_, Refiner::Unit)) => {}
            _ => return Err(ScalarError::MissingUnitEntry),
        }
        let mut built = Vec::with_capacity(entries.len());
        for (label, refiner) in entries {
            if built.iter().any(|e: &BasisEntry| e.label == label) {
                return Err(ScalarError::DuplicateLabel(label));
            }
            built.push(BasisEntry::new(&label, refiner)?);
        }
        Ok(Arc::new(QBasis { entries: built }))
    }

    /// The pure-rational basis `{1}`.
    pub fn rational() -> Arc<Self> {
        QBasis::new(vec![("1".into(), Refiner::Unit)]).expect("unit basis")
    }

    /// The basis `{1, sqrt(q)}`.
    pub fn with_sqrt(q: Rational) -> Result<Arc<Self>, ScalarError> {
        QBasis::new(vec![
            ("1".into(), Refiner::Unit),
            (format!("sqrt({})", format_rational(&q)), Refiner::Sqrt(q)),
        ])
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[BasisEntry] {
        &self.entries
    }
}

pub fn same_basis(a: &Arc<QBasis>, b: &Arc<QBasis>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// A real number `sum coords[i] * basis[i]`, exact over its basis.
#[derive(Debug, Clone)]
pub struct QModReal {
    basis: Arc<QBasis>,
    coords: Vec<Rational>,
}

impl PartialEq for QModReal {
    fn eq(&self, other: &Self) -> bool {
        same_basis(&self.basis, &other.basis) && self.coords == other.coords
    }
}
impl Eq for QModReal {}

impl QModReal {
    pub fn new(basis: Arc<QBasis>, coords: Vec<Rational>) -> Result<Self, ScalarError> {
        if coords.len() != basis.len() {
            return Err(ScalarError::CoordCount {
                expected: basis.len(),
                got: coords.len(),
            });
        }
        Ok(QModReal { basis, coords })
    }

    pub fn zero(basis: &Arc<QBasis>) -> Self {
        QModReal {
            basis: basis.clone(),
            coords: vec![Rational::zero(); basis.len()],
        }
    }

    /// Embed a rational on the constant-1 coordinate.
    pub fn from_rational(basis: &Arc<QBasis>, r: Rational) -> Self {
        let mut coords = vec![Rational::zero(); basis.len()];
        coords[0] = r;
        QModReal {
            basis: basis.clone(),
            coords,
        }
    }

    pub fn basis(&self) -> &Arc<QBasis> {
        &self.basis
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Coordinate-wise sum; errors on basis mismatch.
    pub fn add(&self, other: &Self) -> Result<Self, ScalarError> {
        qmod_combine(
            &[Rational::one(), Rational::one()],
            &[self.clone(), other.clone()],
        )
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ScalarError> {
        qmod_combine(
            &[Rational::one(), -Rational::one()],
            &[self.clone(), other.clone()],
        )
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        QModReal {
            basis: self.basis.clone(),
            coords: self.coords.iter().map(|x| x * c).collect(),
        }
    }

    /// Exact product of two scalars over the same basis, when the product
    /// stays in the span of the basis (for example over `{1, sqrt(q)}`).
    pub fn mul(&self, other: &Self) -> Result<Self, ScalarError> {
        if !same_basis(&self.basis, &other.basis) {
            return Err(ScalarError::MixedBasis);
        }
        let mut coords = vec![Rational::zero(); self.basis.len()];
        for (i, (ci, ei)) in self.coords.iter().zip(self.basis.entries()).enumerate() {
            if ci.is_zero() {
                continue;
            }
            for (j, (cj, ej)) in other.coords.iter().zip(other.basis.entries()).enumerate() {
                if cj.is_zero() {
                    continue;
                }
                let c = ci * cj;
                match (&ei.refiner, &ej.refiner) {
                    (Refiner::Unit, _) => coords[j] += &c,
                    (_, Refiner::Unit) => coords[i] += &c,
                    (Refiner::Sqrt(p), Refiner::Sqrt(q)) => {
                        // sqrt(p)*sqrt(q): rational when p*q is a perfect
                        // square, otherwise a rational multiple of some
                        // declared sqrt entry.
                        let prod = p * q;
                        if let Some(s) = rational_sqrt(&prod) {
                            coords[0] += c * s;
                        } else {
                            let mut placed = false;
                            for (k, ek) in self.basis.entries().iter().enumerate() {
                                if let Refiner::Sqrt(r) = &ek.refiner {
                                    // sqrt(prod) = t*sqrt(r) with t = sqrt(prod*r)/r
                                    if let Some(s) = rational_sqrt(&(&prod * r)) {
                                        coords[k] += &c * s / r;
                                        placed = true;
                                        break;
                                    }
                                }
                            }
                            if !placed {
                                return Err(ScalarError::MixedBasis);
                            }
                        }
                    }
                }
            }
        }
        QModReal::new(self.basis.clone(), coords)
    }
}

impl fmt::Display for QModReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, e) in self.coords.iter().zip(self.basis.entries()) {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match e.refiner {
                Refiner::Unit => write!(f, "{}", format_rational(c))?,
                _ => write!(f, "{}*{}", format_rational(c), e.label)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `sqrt(r)` when `r` is a perfect square of a rational.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = integer_sqrt_exact(r.numer())?;
    let d = integer_sqrt_exact(r.denom())?;
    Some(Rational::new(n, d))
}

fn integer_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let s = n.sqrt();
    if &(&s * &s) == n {
        Some(s)
    } else {
        None
    }
}

/// Default enclosure-refinement budget; each step roughly doubles the
/// number of correct digits.
pub const DEFAULT_REFINE_CAP: u32 = 64;

static REFINE_CAP: std::sync::atomic::AtomicU32 =
    std::sync::atomic::AtomicU32::new(DEFAULT_REFINE_CAP);

/// Process-wide refinement budget used by the default-entry sign tests.
/// Intended to be set once at startup (the CLI wires it to
/// `ISOKIT_REFINE_CAP`); individual calls can still pass explicit caps.
pub fn set_refine_cap(cap: u32) {
    REFINE_CAP.store(cap, std::sync::atomic::Ordering::Relaxed);
}

pub fn refine_cap() -> u32 {
    REFINE_CAP.load(std::sync::atomic::Ordering::Relaxed)
}

/// Exact linear combination `sum coeffs[i] * elems[i]`.
pub fn qmod_combine(coeffs: &[Rational], elems: &[QModReal]) -> Result<QModReal, ScalarError> {
    if coeffs.len() != elems.len() || coeffs.is_empty() {
        return Err(ScalarError::LengthMismatch);
    }
    let basis = elems[0].basis.clone();
    for e in elems {
        if !same_basis(&basis, &e.basis) {
            return Err(ScalarError::MixedBasis);
        }
    }
    let mut coords = vec![Rational::zero(); basis.len()];
    for (c, e) in coeffs.iter().zip(elems) {
        for (acc, x) in coords.iter_mut().zip(&e.coords) {
            *acc += c * x;
        }
    }
    QModReal::new(basis, coords)
}

/// Exact sign of a scalar under the declared basis.
///
/// Zero exactly when every coordinate vanishes; otherwise interval
/// enclosures of the basis entries are refined until the combination
/// excludes zero. Failure to separate within the budget indicates a
/// dependent basis declaration.
pub fn qmod_sign(x: &QModReal) -> Result<Sign, ScalarError> {
    qmod_sign_with_cap(x, refine_cap())
}

pub fn qmod_sign_with_cap(x: &QModReal, cap: u32) -> Result<Sign, ScalarError> {
    if x.is_zero() {
        return Ok(Sign::Zero);
    }
    let mut enclosures: Vec<(Rational, Rational)> = x
        .basis
        .entries()
        .iter()
        .map(|e| e.enclosure.clone())
        .collect();
    for step in 0..=cap {
        let mut lo = Rational::zero();
        let mut hi = Rational::zero();
        for (c, (elo, ehi)) in x.coords.iter().zip(&enclosures) {
            if c.is_zero() {
                continue;
            }
            if c.is_positive() {
                lo += c * elo;
                hi += c * ehi;
            } else {
                lo += c * ehi;
                hi += c * elo;
            }
        }
        if lo.is_positive() {
            return Ok(Sign::Positive);
        }
        if hi.is_negative() {
            return Ok(Sign::Negative);
        }
        for (e, enc) in x.basis.entries().iter().zip(enclosures.iter_mut()) {
            if let Refiner::Sqrt(q) = &e.refiner {
                *enc = heron_step(q, enc, precision_bits(step));
            }
        }
    }
    Err(ScalarError::RefinementBudgetExceeded { cap })
}

/// Working precision doubles per step and saturates, so the budget path
/// stays cheap while honest declarations separate within a few steps.
fn precision_bits(step: u32) -> u32 {
    const MAX_BITS: u32 = 1 << 14;
    if step >= 8 {
        MAX_BITS
    } else {
        64 << step
    }
}

/// One Heron step on an enclosure `[lo, hi]` of `sqrt(q)`, rounded outward
/// to dyadic endpoints with `bits` fractional bits.
fn heron_step(q: &Rational, enc: &(Rational, Rational), bits: u32) -> (Rational, Rational) {
    let two = Rational::from_integer(BigInt::from(2));
    let hi = (&enc.1 + q / &enc.1) / &two;
    let lo = q / &hi;
    let scale = Rational::from_integer(BigInt::one() << bits);
    let lo = Rational::new((lo * &scale).floor().to_integer(), BigInt::one() << bits);
    let hi = Rational::new((hi * &scale).ceil().to_integer(), BigInt::one() << bits);
    (lo.max(enc.0.clone()), hi.min(enc.1.clone()))
}

/// A finite sum `sum coeffs[k] * sqrt(radicand[k])` over canonical positive
/// integer radicands, used for exact cross-multiplied comparisons.
///
/// Radicands are grouped whenever their product is a perfect square, so the
/// zero test (all coefficients zero) is exact without factoring integers.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RadicalSum {
    /// (radicand, coefficient); radicand 1 holds the rational part.
    terms: Vec<(BigInt, Rational)>,
}

impl RadicalSum {
    pub fn zero() -> Self {
        RadicalSum::default()
    }

    pub fn from_rational(r: Rational) -> Self {
        let mut s = RadicalSum::zero();
        s.push(BigInt::one(), r);
        s
    }

    /// Add `coeff * sqrt(radicand)` for a positive rational radicand.
    pub fn push_sqrt(&mut self, coeff: Rational, radicand: &Rational) {
        // sqrt(p/q) = sqrt(p*q)/q
        let int_rad: BigInt = radicand.numer() * radicand.denom();
        let c = coeff / radicand.denom();
        self.push(int_rad, c);
    }

    fn push(&mut self, radicand: BigInt, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        if let Some(s) = integer_sqrt_exact(&radicand) {
            self.fold(BigInt::one(), coeff * s);
            return;
        }
        for k in 0..self.terms.len() {
            let key = self.terms[k].0.clone();
            if key.is_one() {
                continue;
            }
            if let Some(s) = integer_sqrt_exact(&(&key * &radicand)) {
                // sqrt(radicand) = (s/key) * sqrt(key)
                let adj = coeff * Rational::new(s, key);
                self.terms[k].1 += adj;
                return;
            }
        }
        self.terms.push((radicand, coeff));
    }

    fn fold(&mut self, radicand: BigInt, coeff: Rational) {
        for t in &mut self.terms {
            if t.0 == radicand {
                t.1 += coeff;
                return;
            }
        }
        self.terms.push((radicand, coeff));
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (r, c) in &other.terms {
            out.push(r.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (r, c) in &other.terms {
            out.push(r.clone(), -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = RadicalSum::zero();
        for (ra, ca) in &self.terms {
            if ca.is_zero() {
                continue;
            }
            for (rb, cb) in &other.terms {
                if cb.is_zero() {
                    continue;
                }
                out.push(ra * rb, ca * cb);
            }
        }
        out
    }

    /// The value as a rational, when no radical part survives.
    pub fn as_rational(&self) -> Option<Rational> {
        let mut rat = Rational::zero();
        for (r, c) in &self.terms {
            if c.is_zero() {
                continue;
            }
            if r.is_one() {
                rat += c;
            } else {
                return None;
            }
        }
        Some(rat)
    }

    /// Exact sign. Distinct canonical radicands are linearly independent
    /// over the rationals, so zero holds exactly when all coefficients
    /// vanish; otherwise interval refinement terminates.
    pub fn sign(&self, cap: u32) -> Result<Sign, ScalarError> {
        let live: Vec<(&BigInt, &Rational)> = self
            .terms
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(r, c)| (r, c))
            .collect();
        if live.is_empty() {
            return Ok(Sign::Zero);
        }
        if live.len() == 1 && live[0].0.is_one() {
            return Ok(if live[0].1.is_positive() {
                Sign::Positive
            } else {
                Sign::Negative
            });
        }
        let mut enclosures: Vec<(Rational, Rational)> = live
            .iter()
            .map(|(r, _)| {
                let s = (*r).sqrt();
                (
                    Rational::from_integer(s.clone()),
                    Rational::from_integer(s + BigInt::one()),
                )
            })
            .collect();
        for step in 0..=cap {
            let mut lo = Rational::zero();
            let mut hi = Rational::zero();
            for ((_, c), (elo, ehi)) in live.iter().zip(&enclosures) {
                if c.is_positive() {
                    lo += *c * elo;
                    hi += *c * ehi;
                } else {
                    lo += *c * ehi;
                    hi += *c * elo;
                }
            }
            if lo.is_positive() {
                return Ok(Sign::Positive);
            }
            if hi.is_negative() {
                return Ok(Sign::Negative);
            }
            for ((r, _), enc) in live.iter().zip(enclosures.iter_mut()) {
                let q = Rational::from_integer((*r).clone());
                *enc = heron_step(&q, enc, precision_bits(step));
            }
        }
        Err(ScalarError::RefinementBudgetExceeded { cap })
    }

    /// Convert a basis-coordinate scalar to its radical normal form.
    pub fn from_qmod(x: &QModReal) -> Self {
        let mut out = RadicalSum::zero();
        for (c, e) in x.coords().iter().zip(x.basis().entries()) {
            if c.is_zero() {
                continue;
            }
            match &e.refiner {
                Refiner::Unit => out.push(BigInt::one(), c.clone()),
                Refiner::Sqrt(q) => out.push_sqrt(c.clone(), q),
            }
        }
        out
    }
}
