//! Branching classification at a locus point: non-branching, simple cyclic
//! (the continued branch is a constant root-of-unity multiple of itself),
//! or non-cyclic.
//!
//! The local monodromy of a ramification-`N` cycle multiplies the parameter
//! `t^(1/N)` by a primitive `N`-th root of unity, so the branch quotient is
//! constant exactly when all exponents carrying nonzero coefficients agree
//! modulo `N`. A violating exponent pair is an exact disproof. The positive
//! direction is certified only from complete data: a terminating expansion,
//! or a defining polynomial that is binomial in `Y` after centering, both
//! of which pin every exponent. Anything else stays inconclusive.

use num_integer::Integer;

use super::newton::newton_puiseux;
use super::{AlgebraicFunction, Center, PuiseuxError, PuiseuxSeries};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Branching {
    NonBranching,
    SimpleCyclic { period: u32 },
    NonCyclic,
}

const CLASSIFY_TERMS: usize = 12;

/// Classify the local branching of `f` at the finite center `e`.
pub fn classify_branching(f: &AlgebraicFunction, e: &Center) -> Result<Branching, PuiseuxError> {
    let cycles = newton_puiseux(f, e, CLASSIFY_TERMS)?;
    let ramified: Vec<&PuiseuxSeries> = cycles.iter().filter(|c| c.ramification >= 2).collect();
    if ramified.is_empty() {
        return Ok(Branching::NonBranching);
    }
    // exact disproof: two exponents in one cycle disagree modulo N
    for c in &ramified {
        let n = i64::from(c.ramification);
        let mut residues = c.terms.keys().map(|&i| i.rem_euclid(n));
        if let Some(first) = residues.next() {
            if residues.any(|r| r != first) {
                return Ok(Branching::NonCyclic);
            }
        }
    }
    // positive certification needs complete exponent data
    let binomial = is_binomial_at(f, e);
    let mut period = 1u32;
    for c in &ramified {
        if !(c.exact || binomial) {
            return Err(PuiseuxError::TruncationInconclusive);
        }
        let n = i64::from(c.ramification);
        let i0 = c.terms.keys().next().copied().unwrap_or(0).rem_euclid(n);
        let p = (n / n.gcd(&i0)) as u32;
        period = num_integer::lcm(period, p);
    }
    Ok(Branching::SimpleCyclic { period })
}

/// After centering, are all middle `Y`-coefficients identically zero?
/// Then every branch satisfies `Y^d = -a_0(t)/a_d(t)`, whose branches are
/// single-valued after taking `d`-th powers, so all branching is cyclic.
fn is_binomial_at(f: &AlgebraicFunction, e: &Center) -> bool {
    let d = f.degree();
    (1..d).all(|j| {
        let c = f.coeff(j);
        match e {
            Center::Rational(_) => c.is_zero(),
            Center::Infinity => c.is_zero(),
        }
    })
}
