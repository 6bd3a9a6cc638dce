//! Dense univariate polynomials over the rationals: Euclidean arithmetic,
//! resultants, Sturm-sequence real root isolation and rational root
//! extraction. Workhorse for branch loci and characteristic equations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::{format_rational, Rational};

/// Coefficients ascending; no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPoly {
    coeffs: Vec<Rational>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        QPoly::new(vec![c])
    }

    pub fn one() -> Self {
        QPoly::constant(Rational::one())
    }

    pub fn x() -> Self {
        QPoly::new(vec![Rational::zero(), Rational::one()])
    }

    /// `x - a`.
    pub fn linear_root(a: &Rational) -> Self {
        QPoly::new(vec![-a.clone(), Rational::one()])
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        QPoly::new(
            coeffs
                .iter()
                .map(|&c| Rational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; zero polynomial yields `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Valuation at 0: index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        QPoly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        QPoly::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn neg(&self) -> Self {
        QPoly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        QPoly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return QPoly::zero();
        }
        QPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(k + 1)))
                .collect(),
        )
    }

    /// Euclidean division `(quotient, remainder)`.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let dd = divisor.degree().unwrap();
        let lead = divisor.leading().unwrap();
        let mut rem = self.coeffs.clone();
        let mut quo =
            vec![Rational::zero(); self.coeffs.len().saturating_sub(divisor.coeffs.len()) + 1];
        while rem.len() >= divisor.coeffs.len() && !rem.is_empty() {
            let k = rem.len() - 1;
            let factor = rem[k].clone() / lead;
            if !factor.is_zero() {
                quo[k - dd] = factor.clone();
                for (j, c) in divisor.coeffs.iter().enumerate() {
                    rem[k - dd + j] -= &factor * c;
                }
            }
            rem.pop();
        }
        (QPoly::new(quo), QPoly::new(rem))
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if let Some(l) = a.leading() {
            let l = l.clone();
            a = a.scale(&l.recip());
        }
        a
    }

    pub fn squarefree_part(&self) -> Self {
        if self.is_constant() {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        if g.is_constant() {
            return self.clone();
        }
        let (q, r) = self.div_rem(&g);
        debug_assert!(r.is_zero());
        q
    }

    /// Taylor shift: `p(x + a)`.
    pub fn shift(&self, a: &Rational) -> Self {
        let mut out = QPoly::zero();
        let sh = QPoly::new(vec![a.clone(), Rational::one()]);
        for c in self.coeffs.iter().rev() {
            out = out.mul(&sh).add(&QPoly::constant(c.clone()));
        }
        out
    }

    /// Coefficient reversal `x^n p(1/x)` padded to length `n + 1`.
    pub fn reverse_to(&self, n: usize) -> Self {
        let mut out = vec![Rational::zero(); n + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[n - k] = c.clone();
        }
        QPoly::new(out)
    }

    /// Cauchy root bound: all complex roots lie strictly inside `|z| < M`.
    pub fn cauchy_bound(&self) -> Rational {
        let lead = self.leading().expect("nonzero polynomial");
        let mut m = Rational::zero();
        for c in &self.coeffs[..self.coeffs.len() - 1] {
            let r = (c / lead).abs();
            if r > m {
                m = r;
            }
        }
        m + Rational::one()
    }

    pub fn to_display(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let term = match k {
                0 => format_rational(c),
                1 if c.is_one() => var.to_string(),
                1 => format!("{}*{}", format_rational(c), var),
                _ if c.is_one() => format!("{var}^{k}"),
                _ => format!("{}*{}^{}", format_rational(c), var, k),
            };
            parts.push(term);
        }
        parts.join(" + ")
    }
}

/// Resultant of two univariate rational polynomials via the Euclidean
/// remainder sequence.
pub fn resultant(f: &QPoly, g: &QPoly) -> Rational {
    fn go(f: &QPoly, g: &QPoly) -> Rational {
        let df = f.degree().expect("nonzero");
        if g.is_zero() {
            return Rational::zero();
        }
        let dg = g.degree().unwrap();
        if df == 0 {
            return pow_rat(f.leading().unwrap(), dg);
        }
        if dg == 0 {
            return pow_rat(g.leading().unwrap(), df);
        }
        let (_, r) = f.div_rem(g);
        if r.is_zero() {
            return Rational::zero();
        }
        let dr = r.degree().unwrap();
        let sign = if (df * dg) % 2 == 1 {
            -Rational::one()
        } else {
            Rational::one()
        };
        sign * pow_rat(g.leading().unwrap(), df - dr) * go(g, &r)
    }
    if f.is_zero() || g.is_zero() {
        return Rational::zero();
    }
    go(f, g)
}

fn pow_rat(c: &Rational, k: usize) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..k {
        acc *= c;
    }
    acc
}

/// Sturm chain of a squarefree polynomial.
fn sturm_chain(f: &QPoly) -> Vec<QPoly> {
    let mut chain = vec![f.clone(), f.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            break;
        }
        if chain[n - 1].is_constant() {
            break;
        }
        let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
        chain.push(r.neg());
    }
    chain
}

fn sign_variations(chain: &[QPoly], x: &Rational) -> usize {
    let mut last: Option<bool> = None;
    let mut v = 0;
    for p in chain {
        let val = p.eval(x);
        if val.is_zero() {
            continue;
        }
        let s = val.is_positive();
        if let Some(prev) = last {
            if prev != s {
                v += 1;
            }
        }
        last = Some(s);
    }
    v
}

/// An isolated real root: either an exact rational value or an open
/// interval containing exactly one root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RealRoot {
    Exact(Rational),
    Interval(Rational, Rational),
}

impl RealRoot {
    pub fn bounds(&self) -> (Rational, Rational) {
        match self {
            RealRoot::Exact(a) => (a.clone(), a.clone()),
            RealRoot::Interval(a, b) => (a.clone(), b.clone()),
        }
    }
}

/// Isolate all real roots of a squarefree polynomial.
pub fn isolate_real_roots(f: &QPoly) -> Vec<RealRoot> {
    if f.is_constant() {
        return Vec::new();
    }
    let chain = sturm_chain(f);
    let bound = f.cauchy_bound();
    let lo = -bound.clone();
    let hi = bound;
    // Roots in the half-open interval (lo, hi]; lo itself is not a root
    // (strictly outside the Cauchy bound).
    let mut out = Vec::new();
    let mut stack = vec![(lo.clone(), hi.clone())];
    while let Some((a, b)) = stack.pop() {
        let count = sign_variations(&chain, &a).saturating_sub(sign_variations(&chain, &b));
        match count {
            0 => {}
            1 => {
                if f.eval(&b).is_zero() {
                    out.push(RealRoot::Exact(b));
                } else {
                    // shrink away an exact hit at the open end is unnecessary:
                    // a is never a root of f here
                    out.push(RealRoot::Interval(a, b));
                }
            }
            _ => {
                let mid = (&a + &b) / Rational::from_integer(2.into());
                if f.eval(&mid).is_zero() {
                    out.push(RealRoot::Exact(mid.clone()));
                    // carve out a root-free neighborhood of mid
                    let mut w = (&b - &a) / Rational::from_integer(4.into());
                    loop {
                        let l = &mid - &w;
                        let r = &mid + &w;
                        let inner =
                            sign_variations(&chain, &l).saturating_sub(sign_variations(&chain, &r));
                        if inner == 1 && !f.eval(&l).is_zero() && !f.eval(&r).is_zero() {
                            stack.push((a.clone(), l));
                            stack.push((r, b.clone()));
                            break;
                        }
                        w /= Rational::from_integer(2.into());
                    }
                } else {
                    stack.push((a, mid.clone()));
                    stack.push((mid, b));
                }
            }
        }
    }
    out.sort_by(|x, y| x.bounds().0.cmp(&y.bounds().0));
    out
}

/// Narrow an isolating interval below `width` by sign bisection.
pub fn refine_root(f: &QPoly, root: &RealRoot, width: &Rational) -> RealRoot {
    let (mut a, mut b) = match root {
        RealRoot::Exact(_) => return root.clone(),
        RealRoot::Interval(a, b) => (a.clone(), b.clone()),
    };
    let two = Rational::from_integer(2.into());
    while &(&b - &a) > width {
        let mid = (&a + &b) / &two;
        let fm = f.eval(&mid);
        if fm.is_zero() {
            return RealRoot::Exact(mid);
        }
        if f.eval(&a).is_positive() == fm.is_positive() {
            a = mid;
        } else {
            b = mid;
        }
    }
    RealRoot::Interval(a, b)
}

/// All rational roots with multiplicities, or `None` when the candidate
/// divisors are too large to enumerate.
pub fn rational_roots(f: &QPoly) -> Option<Vec<(Rational, usize)>> {
    if f.is_constant() {
        return Some(Vec::new());
    }
    // Clear denominators to an integer polynomial.
    let mut lcm = BigInt::one();
    for c in f.coeffs() {
        lcm = lcm.lcm(c.denom());
    }
    let ints: Vec<BigInt> = f
        .coeffs()
        .iter()
        .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let mut poly = f.clone();
    let mut out: Vec<(Rational, usize)> = Vec::new();
    // factor out roots at zero
    if let Some(v) = poly.valuation() {
        if v > 0 {
            out.push((Rational::zero(), v));
            poly = QPoly::new(poly.coeffs()[v..].to_vec());
        }
    }
    let lead = ints.last().cloned().unwrap_or_else(BigInt::one);
    let trail = ints
        .iter()
        .find(|c| !c.is_zero())
        .cloned()
        .unwrap_or_else(BigInt::one);
    let p_divs = divisors(&trail.abs())?;
    let q_divs = divisors(&lead.abs())?;
    for p in &p_divs {
        for q in &q_divs {
            for sign in [1i32, -1] {
                let cand = Rational::new(p * BigInt::from(sign), q.clone());
                if poly.eval(&cand).is_zero() {
                    let mut mult = 0;
                    let lin = QPoly::linear_root(&cand);
                    loop {
                        let (quo, rem) = poly.div_rem(&lin);
                        if rem.is_zero() {
                            mult += 1;
                            poly = quo;
                        } else {
                            break;
                        }
                    }
                    if mult > 0 {
                        out.push((cand, mult));
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Some(out)
}

const DIVISOR_ENUMERATION_LIMIT: u64 = 1_000_000_000_000;

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    if n.is_zero() {
        return Some(vec![BigInt::one()]);
    }
    let n_u64: u64 = n.abs().try_into().ok()?;
    if n_u64 > DIVISOR_ENUMERATION_LIMIT {
        return None;
    }
    let mut out = Vec::new();
    let mut k = 1u64;
    while k * k <= n_u64 {
        if n_u64.is_multiple_of(k) {
            out.push(BigInt::from(k));
            if k != n_u64 / k {
                out.push(BigInt::from(n_u64 / k));
            }
        }
        k += 1;
    }
    out.sort();
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    #[test]
    fn div_rem_round_trip() {
        let f = QPoly::from_i64(&[-6, 11, -6, 1]); // (x-1)(x-2)(x-3)
        let g = QPoly::from_i64(&[-1, 1]);
        let (q, r) = f.div_rem(&g);
        assert!(r.is_zero());
        assert_eq!(q.mul(&g), f);
    }

    #[test]
    fn gcd_picks_common_factor() {
        let f = QPoly::from_i64(&[-1, 0, 1]); // x^2 - 1
        let g = QPoly::from_i64(&[1, 1]); // x + 1
        assert_eq!(f.gcd(&g), g);
    }

    #[test]
    fn squarefree_part_strips_powers() {
        let f = QPoly::from_i64(&[0, 0, 1]); // x^2
        assert_eq!(f.squarefree_part(), QPoly::x());
    }

    #[test]
    fn resultant_of_quadratic_and_derivative() {
        // disc-like: Res(x^2 - 2, 2x) = -8... sign aside, must be nonzero
        let f = QPoly::from_i64(&[-2, 0, 1]);
        let r = resultant(&f, &f.derivative());
        assert_eq!(r, rat_int(-8));
    }

    #[test]
    fn resultant_detects_common_root() {
        let f = QPoly::from_i64(&[-1, 0, 1]);
        let g = QPoly::from_i64(&[-1, 1]);
        assert_eq!(resultant(&f, &g), rat_int(0));
    }

    #[test]
    fn isolates_three_roots() {
        let f = QPoly::from_i64(&[-6, 11, -6, 1]); // roots 1, 2, 3
        let roots = isolate_real_roots(&f);
        assert_eq!(roots.len(), 3);
        for (root, expect) in roots.iter().zip([1, 2, 3]) {
            let (a, b) = root.bounds();
            assert!(a <= rat_int(expect) && rat_int(expect) <= b);
        }
    }

    #[test]
    fn isolates_irrational_pair() {
        let f = QPoly::from_i64(&[-2, 0, 1]); // ± sqrt 2
        let roots = isolate_real_roots(&f);
        assert_eq!(roots.len(), 2);
        let refined = refine_root(&f, &roots[1], &rat(1, 1000));
        let (a, b) = refined.bounds();
        assert!(a <= rat(1415, 1000) && rat(1414, 1000) <= b);
    }

    #[test]
    fn rational_roots_with_multiplicity() {
        // (x - 1)^2 (2x + 3)
        let f = QPoly::from_i64(&[3, -4, -1, 2]);
        let roots = rational_roots(&f).unwrap();
        assert_eq!(roots, vec![(rat(-3, 2), 1), (rat_int(1), 2)]);
    }

    #[test]
    fn shift_matches_eval() {
        let f = QPoly::from_i64(&[1, -3, 0, 2]);
        let g = f.shift(&rat(5, 7));
        let x = rat(2, 3);
        assert_eq!(g.eval(&x), f.eval(&(&x + rat(5, 7))));
    }
}
