//! Newton-polygon expansion of algebraic functions into Puiseux cycles.
//!
//! The recursion keeps one representative per ramification cycle: each
//! characteristic root contributes a cycle of ramification equal to the
//! edge denominator times whatever further ramification appears below.
//! Simple characteristic roots switch to plain power-series lifting.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::field::{ExtField, Quad};
use super::qpoly::{rational_roots, QPoly};
use super::{AlgebraicFunction, Center, PuiseuxError, PuiseuxSeries};
use crate::scalar::Rational;

const MAX_RECURSION_DEPTH: usize = 64;

/// Dense univariate polynomial over the extension field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct KPoly {
    coeffs: Vec<Quad>,
}

impl KPoly {
    pub(crate) fn new(mut coeffs: Vec<Quad>) -> Self {
        while coeffs.last().is_some_and(Quad::is_zero) {
            coeffs.pop();
        }
        KPoly { coeffs }
    }

    pub(crate) fn zero() -> Self {
        KPoly { coeffs: Vec::new() }
    }

    fn from_qpoly(p: &QPoly) -> Self {
        KPoly::new(p.coeffs().iter().cloned().map(Quad::rational).collect())
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub(crate) fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub(crate) fn coeff(&self, k: usize) -> Quad {
        self.coeffs.get(k).cloned().unwrap_or_else(Quad::zero)
    }

    fn set_coeff(&mut self, k: usize, v: Quad) {
        if self.coeffs.len() <= k {
            self.coeffs.resize(k + 1, Quad::zero());
        }
        self.coeffs[k] = v;
        while self.coeffs.last().is_some_and(Quad::is_zero) {
            self.coeffs.pop();
        }
    }

    fn add(&self, other: &Self, field: &ExtField) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        KPoly::new(
            (0..n)
                .map(|k| field.add(&self.coeff(k), &other.coeff(k)))
                .collect(),
        )
    }

    fn mul(&self, other: &Self, field: &ExtField) -> Self {
        if self.is_zero() || other.is_zero() {
            return KPoly::zero();
        }
        let mut out = vec![Quad::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = field.add(&out[i + j], &field.mul(a, b));
            }
        }
        KPoly::new(out)
    }

    fn mul_trunc(&self, other: &Self, cap: usize, field: &ExtField) -> Self {
        let mut out = vec![Quad::zero(); cap + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > cap || a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j > cap {
                    break;
                }
                if !b.is_zero() {
                    out[i + j] = field.add(&out[i + j], &field.mul(a, b));
                }
            }
        }
        KPoly::new(out)
    }

    fn is_rational(&self) -> bool {
        self.coeffs.iter().all(Quad::is_rational)
    }

    fn to_qpoly(&self) -> Option<QPoly> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c.as_rational()?.clone());
        }
        Some(QPoly::new(out))
    }
}

/// `P(s, Y)` as Y-coefficients over the extension field.
type BiPoly = Vec<KPoly>;

fn bipoly_trim(p: &mut BiPoly) {
    while p.last().is_some_and(KPoly::is_zero) {
        p.pop();
    }
}

/// Evaluate `P(s, y(s))`, optionally truncated in `s`.
fn eval_bipoly(p: &BiPoly, y: &KPoly, cap: Option<usize>, field: &ExtField) -> KPoly {
    let mut acc = KPoly::zero();
    for coeff in p.iter().rev() {
        acc = match cap {
            Some(c) => acc.mul_trunc(y, c, field),
            None => acc.mul(y, field),
        };
        acc = acc.add(coeff, field);
    }
    acc
}

/// One expansion cycle in the local scale: exponents over `ram`.
#[derive(Debug, Clone)]
struct RawBranch {
    ram: u32,
    terms: Vec<(i64, Quad)>,
    exact: bool,
}

/// `s^{-e} * P(s^w, s^u (c + Y))` with `e` the minimal exponent.
fn transform(p: &BiPoly, w: u32, u: i64, c: &Quad, field: &ExtField) -> BiPoly {
    let d = p.len() - 1;
    // binomial table
    let mut binom = vec![vec![Rational::zero(); d + 1]; d + 1];
    for j in 0..=d {
        binom[j][0] = Rational::one();
        for k in 1..=j {
            binom[j][k] = &binom[j - 1][k - 1]
                + if k < j {
                    binom[j - 1][k].clone()
                } else {
                    Rational::zero()
                };
        }
    }
    let mut acc: Vec<BTreeMap<i64, Quad>> = vec![BTreeMap::new(); d + 1];
    for (j, aj) in p.iter().enumerate() {
        if aj.is_zero() {
            continue;
        }
        // c^{j-k} powers
        let mut cpow = vec![Quad::one(); j + 1];
        for t in 1..=j {
            cpow[t] = field.mul(&cpow[t - 1], c);
        }
        for (i, a) in aj.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let base = i64::from(w) * i as i64 + u * j as i64;
            for k in 0..=j {
                let coeff = field.scale(&field.mul(a, &cpow[j - k]), &binom[j][k]);
                if coeff.is_zero() {
                    continue;
                }
                let slot = acc[k].entry(base).or_insert_with(Quad::zero);
                *slot = field.add(slot, &coeff);
            }
        }
    }
    let e = acc
        .iter()
        .flat_map(|m| m.iter())
        .filter(|(_, v)| !v.is_zero())
        .map(|(k, _)| *k)
        .min()
        .unwrap_or(0);
    let mut out: BiPoly = Vec::with_capacity(d + 1);
    for m in acc {
        let mut poly = KPoly::zero();
        for (expo, v) in m {
            if !v.is_zero() {
                let idx = usize::try_from(expo - e).expect("shifted exponent nonnegative");
                poly.set_coeff(idx, v);
            }
        }
        out.push(poly);
    }
    bipoly_trim(&mut out);
    out
}

/// Lower convex hull of `(j, ord)` support points, as vertex list.
fn lower_hull(points: &[(usize, i64)]) -> Vec<(usize, i64)> {
    let mut hull: Vec<(usize, i64)> = Vec::new();
    for &p in points {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.0 - a.0) as i64 * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) as i64;
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// All roots, with multiplicity, of a characteristic polynomial within the
/// quadratic tower; anything needing a wider field is an error.
fn roots_in_tower(phi: &KPoly, field: &mut ExtField) -> Result<Vec<(Quad, usize)>, PuiseuxError> {
    let unsupported = |what: &str| PuiseuxError::UnsupportedCoefficientField(what.to_string());
    let deg = phi
        .degree()
        .ok_or_else(|| unsupported("zero characteristic polynomial"))?;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let mut out: Vec<(Quad, usize)> = Vec::new();
    let mut rest = phi.clone();
    if phi.is_rational() {
        let qp = phi.to_qpoly().expect("rational coefficients");
        let roots = rational_roots(&qp)
            .ok_or_else(|| unsupported("rational-root search beyond divisor limits"))?;
        let mut reduced = qp;
        for (r, mult) in roots {
            out.push((Quad::rational(r.clone()), mult));
            let lin = QPoly::linear_root(&r);
            for _ in 0..mult {
                let (q, rem) = reduced.div_rem(&lin);
                debug_assert!(rem.is_zero());
                reduced = q;
            }
        }
        rest = KPoly::from_qpoly(&reduced);
    }
    match rest.degree() {
        None | Some(0) => Ok(out),
        Some(1) => {
            let root = field
                .div(&field.neg(&rest.coeff(0)), &rest.coeff(1))
                .expect("nonzero leading coefficient");
            out.push((root, 1));
            Ok(out)
        }
        Some(2) => {
            let (a, b, c) = (rest.coeff(2), rest.coeff(1), rest.coeff(0));
            let disc = field.sub(
                &field.mul(&b, &b),
                &field.scale(&field.mul(&a, &c), &Rational::from_integer(4.into())),
            );
            let two_a = field.scale(&a, &Rational::from_integer(2.into()));
            if disc.is_zero() {
                let root = field.div(&field.neg(&b), &two_a).expect("a nonzero");
                out.push((root, 2));
            } else {
                let s = field
                    .sqrt(&disc)
                    .ok_or_else(|| unsupported("square root outside the quadratic tower"))?;
                for sgn in [1i64, -1] {
                    let num = if sgn > 0 {
                        field.add(&field.neg(&b), &s)
                    } else {
                        field.sub(&field.neg(&b), &s)
                    };
                    out.push((field.div(&num, &two_a).expect("a nonzero"), 1));
                }
            }
            Ok(out)
        }
        Some(_) => Err(unsupported(
            "irreducible characteristic factor of degree above 2",
        )),
    }
}

/// Power-series lifting for a simple characteristic root: determines the
/// coefficients of the unique vanishing branch through degree `depth`.
fn regular_lift(p: &BiPoly, depth: usize, field: &ExtField) -> Option<(KPoly, bool)> {
    let a10 = p.get(1).map(|c| c.coeff(0)).unwrap_or_else(Quad::zero);
    if a10.is_zero() {
        return None;
    }
    let mut y = KPoly::zero();
    for k in 1..=depth {
        let value = eval_bipoly(p, &y, Some(k), field);
        let rk = value.coeff(k);
        if rk.is_zero() {
            continue;
        }
        let yk = field.div(&field.neg(&rk), &a10).expect("a10 nonzero");
        y.set_coeff(k, yk);
    }
    let exact = eval_bipoly(p, &y, None, field).is_zero();
    Some((y, exact))
}

fn expand(
    p: &BiPoly,
    field: &mut ExtField,
    lift_depth: usize,
    level0: bool,
    depth: usize,
) -> Result<Vec<RawBranch>, PuiseuxError> {
    if depth > MAX_RECURSION_DEPTH {
        return Err(PuiseuxError::ExpansionOverflow(
            "polygon recursion exceeded its depth limit".into(),
        ));
    }
    let mut p = p.clone();
    bipoly_trim(&mut p);
    let mut out: Vec<RawBranch> = Vec::new();
    if p.is_empty() {
        return Ok(out);
    }
    if p[0].is_zero() {
        // A simple exact zero branch; square-freeness rules out Y^2 | P.
        out.push(RawBranch {
            ram: 1,
            terms: Vec::new(),
            exact: true,
        });
        p.remove(0);
        bipoly_trim(&mut p);
    }
    if p.len() < 2 {
        return Ok(out);
    }
    let support: Vec<(usize, i64)> = p
        .iter()
        .enumerate()
        .filter_map(|(j, a)| a.valuation().map(|v| (j, v as i64)))
        .collect();
    let hull = lower_hull(&support);
    for win in hull.windows(2) {
        let (j0, o0) = win[0];
        let (j1, o1) = win[1];
        let rise = o1 - o0;
        let run = (j1 - j0) as i64;
        if !level0 && rise >= 0 {
            continue; // only vanishing branches below the top level
        }
        let g = gcd_i64(rise.unsigned_abs() as i64, run).max(1);
        let w = (run / g) as u32;
        let u = -rise / g;
        // characteristic polynomial along the edge
        let kmax = (run / i64::from(w)) as usize;
        let mut phi = Vec::with_capacity(kmax + 1);
        for k in 0..=kmax {
            let j = j0 + k * w as usize;
            let ord = o0 - u * k as i64;
            debug_assert!(ord >= 0);
            phi.push(p[j].coeff(ord as usize));
        }
        let phi = KPoly::new(phi);
        for (x0, mult) in roots_in_tower(&phi, field)? {
            debug_assert!(!x0.is_zero());
            let c = field.nth_root(&x0, w).ok_or_else(|| {
                PuiseuxError::UnsupportedCoefficientField(format!(
                    "{}-th root of {} outside the quadratic tower",
                    w,
                    x0.describe(&field.delta)
                ))
            })?;
            let p2 = transform(&p, w, u, &c, field);
            let mut subs: Vec<RawBranch> = Vec::new();
            let mut handled = false;
            if mult == 1 {
                if let Some((y, exact)) = regular_lift(&p2, lift_depth, field) {
                    let terms: Vec<(i64, Quad)> = y
                        .coeffs
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| !v.is_zero())
                        .map(|(i, v)| (i as i64, v.clone()))
                        .collect();
                    subs.push(RawBranch {
                        ram: 1,
                        terms,
                        exact,
                    });
                    handled = true;
                }
            }
            if !handled {
                subs = expand(&p2, field, lift_depth, false, depth + 1)?;
                let total: u32 = subs.iter().map(|b| b.ram).sum();
                if total as usize != mult {
                    return Err(PuiseuxError::ExpansionOverflow(format!(
                        "vanishing-branch count {total} does not match multiplicity {mult}"
                    )));
                }
            }
            for sub in subs {
                let wp = i64::from(sub.ram);
                let mut terms = vec![(u * wp, c.clone())];
                for (i, q) in sub.terms {
                    let expo = u * wp + i;
                    if expo == u * wp {
                        // coincides with the cycle's leading slot
                        let merged = field.add(&terms[0].1, &q);
                        terms[0].1 = merged;
                    } else {
                        terms.push((expo, q));
                    }
                }
                terms.retain(|(_, q)| !q.is_zero());
                terms.sort_by_key(|(e, _)| *e);
                out.push(RawBranch {
                    ram: w * sub.ram,
                    terms,
                    exact: sub.exact,
                });
            }
        }
    }
    Ok(out)
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Exact valuation (in `t^(1/N)` units) of `P(t^N, branch)`; `None` when
/// the residual vanishes identically.
fn residual_valuation(shifted: &BiPoly, branch: &RawBranch, field: &ExtField) -> Option<i64> {
    let d = (shifted.len() - 1) as i64;
    let m = branch.terms.first().map(|(e, _)| *e).unwrap_or(0).min(0);
    // B = tau^m * Btilde with Btilde of nonnegative support
    let mut btilde = KPoly::zero();
    for (e, q) in &branch.terms {
        btilde.set_coeff(usize::try_from(e - m).expect("nonnegative"), q.clone());
    }
    // R*tau^{-m d} = sum_j A_j(tau^N) tau^{m (j - d)} Btilde^j
    let mut total = KPoly::zero();
    let mut bpow = KPoly::new(vec![Quad::one()]);
    for (j, aj) in shifted.iter().enumerate() {
        if !aj.is_zero() {
            let mut stretched = KPoly::zero();
            for (i, c) in aj.coeffs.iter().enumerate() {
                if !c.is_zero() {
                    stretched.set_coeff(i * branch.ram as usize, c.clone());
                }
            }
            let shift = usize::try_from(m * (j as i64 - d)).expect("nonnegative shift");
            let mut shifted_term = KPoly::zero();
            for (i, c) in stretched.coeffs.iter().enumerate() {
                if !c.is_zero() {
                    shifted_term.set_coeff(i + shift, c.clone());
                }
            }
            total = total.add(&shifted_term.mul(&bpow, field), field);
        }
        if j < shifted.len() - 1 {
            bpow = bpow.mul(&btilde, field);
        }
    }
    // exponents are in tau = t^(1/N) units
    total.valuation().map(|v| v as i64 + m * d)
}

/// Expand all branches of `f` at a center into ramification cycles.
///
/// Each returned series represents one cycle of `ramification` conjugate
/// branches; the ramification indices over all cycles sum to the degree.
/// `terms` controls how deep the regular part of each branch is lifted.
pub fn newton_puiseux(
    f: &AlgebraicFunction,
    center: &Center,
    terms: usize,
) -> Result<Vec<PuiseuxSeries>, PuiseuxError> {
    let shifted: Vec<QPoly> = match center {
        Center::Rational(e) => f.coeffs().iter().map(|c| c.shift(e)).collect(),
        Center::Infinity => {
            let dd = f.max_z_degree();
            f.coeffs().iter().map(|c| c.reverse_to(dd)).collect()
        }
    };
    let mut field = ExtField::rational_field();
    let bi: BiPoly = shifted.iter().map(KPoly::from_qpoly).collect();
    let raw = expand(&bi, &mut field, terms.max(1), true, 0)?;
    let total: u32 = raw.iter().map(|b| b.ram).sum();
    if total as usize != f.degree() {
        return Err(PuiseuxError::ExpansionOverflow(format!(
            "cycle ramifications sum to {total}, expected degree {}",
            f.degree()
        )));
    }
    let mut out: Vec<PuiseuxSeries> = raw
        .iter()
        .map(|b| {
            let val = if b.exact {
                None
            } else {
                residual_valuation(&bi, b, &field)
            };
            PuiseuxSeries {
                center: center.clone(),
                ramification: b.ram,
                delta: field.delta.clone(),
                terms: b.terms.iter().cloned().collect(),
                exact: b.exact,
                residual_valuation: val,
            }
        })
        .collect();
    out.sort_by_key(|s| {
        (
            s.terms.keys().next().copied().unwrap_or(i64::MAX),
            s.ramification,
        )
    });
    Ok(out)
}
