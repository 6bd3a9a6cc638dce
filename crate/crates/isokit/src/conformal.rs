//! Decision procedures on the conformal factors: the nonnegative-rational
//! cone condition, the bounded integer factor equation, and minimum-ratio
//! selection. Everything here is exact rational arithmetic.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::scalar::{
    qmod_combine, qmod_sign, refine_cap, same_basis, QModReal, RadicalSum, Rational, ScalarError,
    Sign,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConformalError {
    #[error("all entries must be strictly positive")]
    NonPositiveEntry,
    #[error("entry lists must have equal nonzero length")]
    LengthMismatch,
    #[error("conformal data must share a single basis")]
    MixedBasis,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// The conformal factors of one identity: weights `mu`, `lambda` and the
/// exponent `r`, all over one declared basis.
#[derive(Debug, Clone)]
pub struct ConformalData {
    pub mu: Vec<QModReal>,
    pub lambda: Vec<QModReal>,
    pub r: QModReal,
}

impl ConformalData {
    pub fn new(
        mu: Vec<QModReal>,
        lambda: Vec<QModReal>,
        r: QModReal,
    ) -> Result<Self, ConformalError> {
        let basis = r.basis();
        for x in mu.iter().chain(&lambda) {
            if !same_basis(basis, x.basis()) {
                return Err(ConformalError::MixedBasis);
            }
            if qmod_sign(x)? != Sign::Positive {
                return Err(ConformalError::NonPositiveEntry);
            }
        }
        Ok(ConformalData { mu, lambda, r })
    }
}

/// A nonzero common element of the two nonnegative-rational cones:
/// `sum c_j lambda_j = sum d_l mu_l = value != 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeWitness {
    pub c: Vec<Rational>,
    pub d: Vec<Rational>,
    pub value: QModReal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeDecision {
    Holds { vacuous: bool },
    Violated(ConeWitness),
}

impl ConeDecision {
    pub fn holds(&self) -> bool {
        matches!(self, ConeDecision::Holds { .. })
    }
}

/// Decide `span_Q0+{lambda} âˆ© span_Q0+{mu} = {0}` exactly.
///
/// Nonnegative rationals `c, d` with `sum c_j lambda_j = sum d_l mu_l` and
/// `c != 0` exist iff the linear program with the normalization
/// `sum c_j = 1` is feasible; positivity of the factors makes the common
/// value automatically nonzero. Decided by exact phase-one simplex with
/// Bland's rule.
pub fn cone_condition(data: &ConformalData) -> Result<ConeDecision, ConformalError> {
    cone_condition_by(data, LpMethod::Simplex)
}

/// Independent elimination route over the same system, kept as a
/// cross-check oracle for small systems (at most 6 variables).
pub fn cone_condition_fm(data: &ConformalData) -> Result<ConeDecision, ConformalError> {
    cone_condition_by(data, LpMethod::FourierMotzkin)
}

enum LpMethod {
    Simplex,
    FourierMotzkin,
}

fn cone_condition_by(
    data: &ConformalData,
    method: LpMethod,
) -> Result<ConeDecision, ConformalError> {
    let v = data.lambda.len();
    let m = data.mu.len();
    if v == 0 || m == 0 {
        return Ok(ConeDecision::Holds { vacuous: true });
    }
    let basis_len = data.r.basis().len();
    // Equality rows over each basis coordinate plus the normalization row.
    let nvars = v + m;
    let mut rows: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for t in 0..basis_len {
        let mut row = Vec::with_capacity(nvars);
        for lam in &data.lambda {
            row.push(lam.coords()[t].clone());
        }
        for mu in &data.mu {
            row.push(-mu.coords()[t].clone());
        }
        rows.push((row, Rational::zero()));
    }
    let mut norm = vec![Rational::zero(); nvars];
    for x in norm.iter_mut().take(v) {
        *x = Rational::one();
    }
    rows.push((norm, Rational::one()));

    let solution = match method {
        LpMethod::Simplex => simplex_feasible(&rows, nvars),
        LpMethod::FourierMotzkin => fm_feasible(&rows, nvars),
    };
    match solution {
        None => Ok(ConeDecision::Holds { vacuous: false }),
        Some(x) => {
            let c: Vec<Rational> = x[..v].to_vec();
            let d: Vec<Rational> = x[v..].to_vec();
            let value = qmod_combine(&c, &data.lambda)?;
            debug_assert_eq!(qmod_combine(&d, &data.mu)?, value);
            debug_assert_ne!(qmod_sign(&value)?, Sign::Zero);
            Ok(ConeDecision::Violated(ConeWitness { c, d, value }))
        }
    }
}

/// Phase-one simplex feasibility for `A x = b, x >= 0`, exact rationals.
/// Returns a feasible point, or `None`.
#[allow(clippy::needless_range_loop)] // rows of `t` are updated against each other
fn simplex_feasible(rows: &[(Vec<Rational>, Rational)], nvars: usize) -> Option<Vec<Rational>> {
    let m = rows.len();
    let ncols = nvars + m; // structural + one artificial per row
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for (i, (row, rhs)) in rows.iter().enumerate() {
        let flip = rhs.is_negative();
        let mut r: Vec<Rational> = row
            .iter()
            .map(|c| if flip { -c.clone() } else { c.clone() })
            .collect();
        r.resize(ncols, Rational::zero());
        r[nvars + i] = Rational::one();
        r.push(if flip { -rhs.clone() } else { rhs.clone() });
        t.push(r);
    }
    let mut basis: Vec<usize> = (nvars..ncols).collect();
    // Reduced costs for minimizing the sum of artificials.
    let mut red: Vec<Rational> = vec![Rational::zero(); ncols + 1];
    for j in 0..=ncols {
        let mut s = Rational::zero();
        for row in t.iter() {
            s += &row[j];
        }
        // c_j - c_B . column: structural c_j = 0, artificial c_j = 1.
        let cj = if (nvars..ncols).contains(&j) {
            Rational::one()
        } else {
            Rational::zero()
        };
        red[j] = cj - s;
    }
    loop {
        // Bland: smallest-index entering column with negative reduced cost.
        let enter = (0..ncols).find(|&j| red[j].is_negative());
        let enter = match enter {
            Some(j) => j,
            None => break,
        };
        // Ratio test, ties by smallest basis variable.
        let mut leave: Option<usize> = None;
        let mut best: Option<Rational> = None;
        for (i, row) in t.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[ncols] / &row[enter];
                let better = match &best {
                    None => true,
                    Some(b) => ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()]),
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let leave = leave?; // unbounded cannot happen in phase one
        let pivot = t[leave][enter].clone();
        for x in t[leave].iter_mut() {
            *x /= &pivot;
        }
        for i in 0..m {
            if i == leave || t[i][enter].is_zero() {
                continue;
            }
            let factor = t[i][enter].clone();
            for j in 0..=ncols {
                let delta = &factor * &t[leave][j];
                t[i][j] -= delta;
            }
        }
        if !red[enter].is_zero() {
            let factor = red[enter].clone();
            for j in 0..=ncols {
                let delta = &factor * &t[leave][j];
                red[j] -= delta;
            }
        }
        basis[leave] = enter;
    }
    // Optimum of the artificial objective: sum of artificial basic values.
    let mut opt = Rational::zero();
    for (i, &b) in basis.iter().enumerate() {
        if b >= nvars {
            opt += &t[i][ncols];
        }
    }
    if !opt.is_zero() {
        return None;
    }
    let mut x = vec![Rational::zero(); nvars];
    for (i, &b) in basis.iter().enumerate() {
        if b < nvars {
            x[b] = t[i][ncols].clone();
        }
    }
    Some(x)
}

/// Fourier–Motzkin feasibility with witness reconstruction.
fn fm_feasible(rows: &[(Vec<Rational>, Rational)], nvars: usize) -> Option<Vec<Rational>> {
    // Inequality system `a . x <= b`: each equality twice, plus x >= 0.
    let mut ineqs: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for (row, rhs) in rows {
        ineqs.push((row.clone(), rhs.clone()));
        ineqs.push((row.iter().map(|c| -c.clone()).collect(), -rhs.clone()));
    }
    for i in 0..nvars {
        let mut row = vec![Rational::zero(); nvars];
        row[i] = -Rational::one();
        ineqs.push((row, Rational::zero()));
    }
    // Eliminate variables back to front, remembering each stage.
    let mut stages: Vec<Vec<(Vec<Rational>, Rational)>> = Vec::new();
    let mut current = ineqs;
    for k in (0..nvars).rev() {
        stages.push(current.clone());
        let mut next: Vec<(Vec<Rational>, Rational)> = Vec::new();
        let mut pos: Vec<&(Vec<Rational>, Rational)> = Vec::new();
        let mut neg: Vec<&(Vec<Rational>, Rational)> = Vec::new();
        for r in &current {
            if r.0[k].is_positive() {
                pos.push(r);
            } else if r.0[k].is_negative() {
                neg.push(r);
            } else {
                next.push(r.clone());
            }
        }
        for p in &pos {
            for n in &neg {
                // scale so the k coefficients cancel
                let (pc, nc) = (&p.0[k], &n.0[k]);
                let row: Vec<Rational> =
                    p.0.iter().zip(&n.0).map(|(a, b)| a / pc - b / nc).collect();
                let rhs = &p.1 / pc - &n.1 / nc;
                next.push((row, rhs));
            }
        }
        current = next;
    }
    for (row, rhs) in &current {
        debug_assert!(row.iter().all(Zero::is_zero));
        if rhs.is_negative() {
            return None;
        }
    }
    // Back-substitute: stages were pushed for k = nvars-1 down to 0.
    let mut x = vec![Rational::zero(); nvars];
    for (idx, k) in (0..nvars).rev().enumerate().rev() {
        let stage = &stages[idx];
        let mut lower: Option<Rational> = None;
        let mut upper: Option<Rational> = None;
        for (row, rhs) in stage {
            let coeff = &row[k];
            if coeff.is_zero() {
                continue;
            }
            let mut rest = rhs.clone();
            for (j, c) in row.iter().enumerate() {
                if j != k && !c.is_zero() {
                    rest -= c * &x[j];
                }
            }
            let bound = &rest / coeff;
            if coeff.is_positive() {
                upper = Some(match upper {
                    None => bound,
                    Some(u) => u.min(bound),
                });
            } else {
                lower = Some(match lower {
                    None => bound,
                    Some(l) => l.max(bound),
                });
            }
        }
        x[k] = match (lower, upper) {
            (Some(l), Some(u)) => {
                debug_assert!(l <= u);
                (l + u) / Rational::from_integer(BigInt::from(2))
            }
            (Some(l), None) => l,
            (None, Some(u)) => u.min(Rational::zero()),
            (None, None) => Rational::zero(),
        };
    }
    Some(x)
}

/// One solution of the bounded integer factor equation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FactorSolution {
    pub m: Vec<u32>,
    pub n: Vec<u32>,
}

/// All solutions of `r = sum mu_l m_l - sum lambda_j n_j` with every entry
/// in `[1, bound]`, coordinate-wise over the basis, in lexicographic order.
pub fn solve_factor_equation(
    data: &ConformalData,
    bound: u32,
) -> Result<Vec<FactorSolution>, ConformalError> {
    solve_factor_equation_opts(data, bound, false)
}

/// Variant that admits zero entries for exploration.
pub fn solve_factor_equation_opts(
    data: &ConformalData,
    bound: u32,
    allow_zero: bool,
) -> Result<Vec<FactorSolution>, ConformalError> {
    if bound == 0 {
        return Ok(Vec::new());
    }
    let k = data.r.basis().len();
    let low = u32::from(!allow_zero);
    // Signed coefficient vectors: +mu then -lambda.
    let mut coefs: Vec<Vec<Rational>> = Vec::new();
    for muv in &data.mu {
        coefs.push(muv.coords().to_vec());
    }
    for lam in &data.lambda {
        coefs.push(lam.coords().iter().map(|c| -c.clone()).collect());
    }
    let nvars = coefs.len();
    // Suffix contribution ranges per coordinate for pruning.
    let mut lo_suffix = vec![vec![Rational::zero(); k]; nvars + 1];
    let mut hi_suffix = vec![vec![Rational::zero(); k]; nvars + 1];
    for i in (0..nvars).rev() {
        for t in 0..k {
            let c = &coefs[i][t];
            let a = c * Rational::from_integer(BigInt::from(low));
            let b = c * Rational::from_integer(BigInt::from(bound));
            let (cl, ch) = if a <= b { (a, b) } else { (b, a) };
            lo_suffix[i][t] = &lo_suffix[i + 1][t] + cl;
            hi_suffix[i][t] = &hi_suffix[i + 1][t] + ch;
        }
    }
    let target = data.r.coords();
    let mut out = Vec::new();
    let mut choice = vec![0u32; nvars];
    let mut partial = vec![vec![Rational::zero(); k]]; // stack of partial sums

    fn feasible(
        partial: &[Rational],
        lo: &[Rational],
        hi: &[Rational],
        target: &[Rational],
    ) -> bool {
        for t in 0..target.len() {
            let min = &partial[t] + &lo[t];
            let max = &partial[t] + &hi[t];
            if min > target[t] || max < target[t] {
                return false;
            }
        }
        true
    }

    #[allow(clippy::too_many_arguments)]
    fn rec(
        depth: usize,
        nvars: usize,
        low: u32,
        bound: u32,
        coefs: &[Vec<Rational>],
        lo_suffix: &[Vec<Rational>],
        hi_suffix: &[Vec<Rational>],
        target: &[Rational],
        choice: &mut Vec<u32>,
        partial: &mut Vec<Vec<Rational>>,
        mu_len: usize,
        out: &mut Vec<FactorSolution>,
    ) {
        if depth == nvars {
            let last = partial.last().unwrap();
            if last.iter().zip(target).all(|(a, b)| a == b) {
                out.push(FactorSolution {
                    m: choice[..mu_len].to_vec(),
                    n: choice[mu_len..].to_vec(),
                });
            }
            return;
        }
        for v in low..=bound {
            let prev = partial.last().unwrap().clone();
            let next: Vec<Rational> = prev
                .iter()
                .zip(&coefs[depth])
                .map(|(p, c)| p + c * Rational::from_integer(BigInt::from(v)))
                .collect();
            if feasible(&next, &lo_suffix[depth + 1], &hi_suffix[depth + 1], target) {
                choice[depth] = v;
                partial.push(next);
                rec(
                    depth + 1,
                    nvars,
                    low,
                    bound,
                    coefs,
                    lo_suffix,
                    hi_suffix,
                    target,
                    choice,
                    partial,
                    mu_len,
                    out,
                );
                partial.pop();
            }
        }
    }

    rec(
        0,
        nvars,
        low,
        bound,
        &coefs,
        &lo_suffix,
        &hi_suffix,
        target,
        &mut choice,
        &mut partial,
        data.mu.len(),
        &mut out,
    );
    out.sort();
    Ok(out)
}

/// Smallest index minimizing `a_i / b_i`, decided by exact
/// cross-multiplied sign tests. The result satisfies
/// `a_i * b_{i0} >= b_i * a_{i0}` for every `i`.
pub fn min_ratio_index(a: &[QModReal], b: &[QModReal]) -> Result<usize, ConformalError> {
    if a.is_empty() || a.len() != b.len() {
        return Err(ConformalError::LengthMismatch);
    }
    for x in a.iter().chain(b) {
        if qmod_sign(x)? != Sign::Positive {
            return Err(ConformalError::NonPositiveEntry);
        }
    }
    let rs: Vec<(RadicalSum, RadicalSum)> = a
        .iter()
        .zip(b)
        .map(|(x, y)| (RadicalSum::from_qmod(x), RadicalSum::from_qmod(y)))
        .collect();
    let mut best = 0usize;
    for i in 1..rs.len() {
        // a_i/b_i < a_best/b_best  <=>  a_i*b_best - a_best*b_i < 0
        let diff = rs[i].0.mul(&rs[best].1).sub(&rs[best].0.mul(&rs[i].1));
        if diff.sign(refine_cap())? == Sign::Negative {
            best = i;
        }
    }
    Ok(best)
}
