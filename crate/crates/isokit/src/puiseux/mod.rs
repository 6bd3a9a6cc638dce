//! One-variable algebraic functions: minimal polynomials, branch loci,
//! Newton–Puiseux expansions, monodromy along loops, and the simple-cyclic
//! versus non-cyclic branching classification.
//!
//! Everything is exact except monodromy, which continues roots numerically
//! and rounds to a permutation only behind certified separation margins.

pub mod classify;
pub mod field;
pub mod locus;
pub mod monodromy;
pub mod newton;
pub mod qpoly;

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::scalar::{qmod_combine, qmod_sign, QModReal, Rational, ScalarError, Sign};
use field::Quad;
use qpoly::{resultant, QPoly};

pub use classify::{classify_branching, Branching};
pub use locus::{branch_locus, BranchLocus, LocusPoint};
pub use monodromy::{monodromy_circle, monodromy_loci, LoopShape, MonodromyAction};
pub use newton::newton_puiseux;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PuiseuxError {
    #[error("polynomial is not square-free in Y")]
    NotSquareFree,
    #[error("coefficients a_k(z) share a nonconstant polynomial factor")]
    NotPrimitive,
    #[error("polynomial must have Y-degree at least 1")]
    ZeroDegree,
    #[error("expansion requires an unsupported coefficient field: {0}")]
    UnsupportedCoefficientField(String),
    #[error("continuation path passes too close to the branch locus")]
    PathTooCloseToLocus,
    #[error("root matching is ambiguous at the requested separation threshold")]
    AmbiguousMatching,
    #[error("constancy holds to the truncation order but is not provable from the stored data")]
    TruncationInconclusive,
    #[error("complex root isolation failed: {0}")]
    IsolationFailed(String),
    #[error("expansion exceeded internal size limits: {0}")]
    ExpansionOverflow(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// An algebraic function given by its defining polynomial
/// `P(z, Y) = a_d(z) Y^d + ... + a_0(z)`, square-free in `Y` and with no
/// common polynomial factor among the coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraicFunction {
    /// `coeffs[j]` multiplies `Y^j`.
    coeffs: Vec<QPoly>,
}

impl AlgebraicFunction {
    pub fn new(coeffs: Vec<QPoly>) -> Result<Self, PuiseuxError> {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(QPoly::is_zero) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(PuiseuxError::ZeroDegree);
        }
        let mut content = QPoly::zero();
        for c in &coeffs {
            content = content.gcd(c);
        }
        if !content.is_zero() && !content.is_constant() {
            return Err(PuiseuxError::NotPrimitive);
        }
        let f = AlgebraicFunction { coeffs };
        if f.discriminant_poly().is_zero() {
            return Err(PuiseuxError::NotSquareFree);
        }
        Ok(f)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, j: usize) -> &QPoly {
        &self.coeffs[j]
    }

    pub fn coeffs(&self) -> &[QPoly] {
        &self.coeffs
    }

    pub fn leading(&self) -> &QPoly {
        self.coeffs.last().expect("degree >= 1")
    }

    pub fn max_z_degree(&self) -> usize {
        self.coeffs
            .iter()
            .filter_map(QPoly::degree)
            .max()
            .unwrap_or(0)
    }

    /// `P(z0, Y)` as a univariate polynomial in `Y`.
    pub fn specialize(&self, z0: &Rational) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| c.eval(z0)).collect())
    }

    /// `dP/dY`.
    pub fn derivative_y(&self) -> Vec<QPoly> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| c.scale(&Rational::from_integer(j.into())))
            .collect()
    }

    /// `Res_Y(P, dP/dY)` as a polynomial in `z`, by evaluation and
    /// interpolation at points where no leading degree drops.
    pub fn discriminant_poly(&self) -> QPoly {
        let d = self.degree();
        let dz = self.max_z_degree();
        let bound = dz * (2 * d).saturating_sub(1) + 1;
        let deriv = self.derivative_y();
        let deriv_lead = deriv.last().cloned().unwrap_or_else(QPoly::zero);
        let mut samples: Vec<(Rational, Rational)> = Vec::new();
        let mut k: i64 = 0;
        while samples.len() < bound {
            let x = Rational::from_integer(k.into());
            k = if k >= 0 { -(k + 1) } else { -k };
            if self.leading().eval(&x).is_zero() || deriv_lead.eval(&x).is_zero() {
                continue;
            }
            let p = self.specialize(&x);
            let q = QPoly::new(deriv.iter().map(|c| c.eval(&x)).collect());
            samples.push((x, resultant(&p, &q)));
        }
        lagrange_interpolate(&samples)
    }
}

fn lagrange_interpolate(points: &[(Rational, Rational)]) -> QPoly {
    let mut acc = QPoly::zero();
    for (i, (xi, yi)) in points.iter().enumerate() {
        if yi.is_zero() {
            continue;
        }
        let mut num = QPoly::one();
        let mut den = Rational::one();
        for (j, (xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            num = num.mul(&QPoly::linear_root(xj));
            den *= xi - xj;
        }
        acc = acc.add(&num.scale(&(yi / den)));
    }
    acc
}

/// Expansion center.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Center {
    Rational(Rational),
    Infinity,
}

impl std::fmt::Display for Center {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Center::Rational(r) => write!(f, "{}", crate::scalar::format_rational(r)),
            Center::Infinity => write!(f, "inf"),
        }
    }
}

/// One ramification cycle of branches at a center, represented by a single
/// fractional-power expansion `sum a_i t^(i/N)` in the local parameter
/// (`t = z - center` at a finite center, `t = 1/z` at infinity).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PuiseuxSeries {
    pub center: Center,
    /// Ramification index `N`; the cycle consists of `N` conjugate branches.
    pub ramification: u32,
    /// Radicand of the quadratic extension the coefficients live in, if any.
    pub delta: Option<Rational>,
    /// Exponent numerator over `ramification` -> coefficient.
    pub terms: BTreeMap<i64, Quad>,
    /// The stored terms are a complete exact root of `P`.
    pub exact: bool,
    /// Exact valuation (in `t^(1/N)` units) of `P(center + t^N, series)`;
    /// `None` when the residual vanishes identically.
    pub residual_valuation: Option<i64>,
}

impl PuiseuxSeries {
    /// Leading exponent as `(i0, N)` with the value `a_{i0} != 0`.
    pub fn leading_exponent(&self) -> Option<(i64, u32)> {
        self.terms.keys().next().map(|&i| (i, self.ramification))
    }

    pub fn leading_coefficient(&self) -> Option<&Quad> {
        self.terms.values().next()
    }

    pub fn describe(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (i, c) in &self.terms {
            let coeff = c.describe(&self.delta);
            let expo = if self.ramification == 1 {
                format!("{i}")
            } else {
                format!("{}/{}", i, self.ramification)
            };
            let term = if *i == 0 {
                coeff
            } else if coeff == "1" {
                format!("t^({expo})")
            } else {
                format!("({coeff})*t^({expo})")
            };
            parts.push(term);
        }
        parts.join(" + ")
    }
}

/// Boundedness report for the leading `Y`-coefficient.
#[derive(Debug, Clone)]
pub struct LeadingCoeffReport {
    /// True iff the leading coefficient is a nonzero constant.
    pub monic_normalizable: bool,
    /// Zeros of the leading coefficient: the points of potential
    /// unboundedness of branches.
    pub indeterminacy_points: Vec<LocusPoint>,
    /// When monic-normalizable, an exact bound on every branch over the
    /// closed disk of radius 10, from coefficient norms.
    pub disk10_bound: Option<Rational>,
}

/// Check whether all branches stay bounded on compacts: true exactly when
/// the leading coefficient is a nonzero constant.
pub fn leading_coeff_check(f: &AlgebraicFunction) -> Result<LeadingCoeffReport, PuiseuxError> {
    let lead = f.leading();
    let monic = lead.is_constant();
    if monic {
        // |Y| <= 1 + max_k sup_{|z|<=10} |a_k(z)/a_d|
        let lc = lead.leading().expect("nonzero leading coefficient");
        let ten = Rational::from_integer(10.into());
        let mut worst = Rational::zero();
        for c in &f.coeffs()[..f.degree()] {
            let mut s = Rational::zero();
            let mut p = Rational::one();
            for a in c.coeffs() {
                s += a.abs() * &p;
                p *= &ten;
            }
            s /= lc.abs();
            if s > worst {
                worst = s;
            }
        }
        Ok(LeadingCoeffReport {
            monic_normalizable: true,
            indeterminacy_points: Vec::new(),
            disk10_bound: Some(worst + Rational::one()),
        })
    } else {
        let points = locus::isolate_poly_roots(&lead.squarefree_part())?;
        Ok(LeadingCoeffReport {
            monic_normalizable: false,
            indeterminacy_points: points,
            disk10_bound: None,
        })
    }
}

/// The integer relation forced by comparing lowest-degree Puiseux exponents
/// in a weighted product identity, together with its exact verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchRelation {
    pub n1: u32,
    pub n_rest: Vec<i64>,
    /// Whether `mu_1 n_1 = sum_a mu_a n_a` holds exactly.
    pub holds: bool,
}

/// Form the relation `n_1 = N0`, `n_a = -i_a` and test
/// `mu_1 n_1 - sum mu_a n_a = 0` exactly over the weights' basis.
pub fn derive_branch_relation(
    leading_exponents: &[i64],
    n0: u32,
    weights: &[QModReal],
) -> Result<BranchRelation, PuiseuxError> {
    if weights.len() != leading_exponents.len() + 1 || n0 == 0 {
        return Err(PuiseuxError::Scalar(ScalarError::LengthMismatch));
    }
    for w in weights {
        if qmod_sign(w)? != Sign::Positive {
            return Err(PuiseuxError::Scalar(ScalarError::LengthMismatch));
        }
    }
    let n_rest: Vec<i64> = leading_exponents.iter().map(|&i| -i).collect();
    let mut coeffs = vec![Rational::from_integer(n0.into())];
    coeffs.extend(n_rest.iter().map(|&n| -Rational::from_integer(n.into())));
    let value = qmod_combine(&coeffs, weights)?;
    Ok(BranchRelation {
        n1: n0,
        n_rest,
        holds: qmod_sign(&value)? == Sign::Zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat_int, QBasis};

    pub(crate) fn af(coeffs: &[&[i64]]) -> AlgebraicFunction {
        AlgebraicFunction::new(coeffs.iter().map(|c| QPoly::from_i64(c)).collect()).unwrap()
    }

    #[test]
    fn rejects_non_squarefree() {
        // (Y - z)^2 = Y^2 - 2z Y + z^2
        let r = AlgebraicFunction::new(vec![
            QPoly::from_i64(&[0, 0, 1]),
            QPoly::from_i64(&[0, -2]),
            QPoly::from_i64(&[1]),
        ]);
        assert_eq!(r.unwrap_err(), PuiseuxError::NotSquareFree);
    }

    #[test]
    fn rejects_imprimitive() {
        // z * (Y^2 - 1)
        let r = AlgebraicFunction::new(vec![
            QPoly::from_i64(&[0, -1]),
            QPoly::zero(),
            QPoly::from_i64(&[0, 1]),
        ]);
        assert_eq!(r.unwrap_err(), PuiseuxError::NotPrimitive);
    }

    #[test]
    fn discriminant_of_sqrt() {
        // Y^2 - z: resultant(Y^2 - c, 2Y) = 4c... as poly in z: -4z? magnitude aside
        let f = af(&[&[0, -1], &[], &[1]]);
        let disc = f.discriminant_poly();
        assert_eq!(disc.degree(), Some(1));
        assert!(disc.eval(&rat_int(0)).is_zero());
    }

    #[test]
    fn discriminant_of_quadratic_in_both() {
        // Y^2 + zY + 1: discriminant locus z^2 - 4
        let f = af(&[&[1], &[0, 1], &[1]]);
        let disc = f.discriminant_poly();
        let sf = disc.squarefree_part();
        assert!(sf.eval(&rat_int(2)).is_zero());
        assert!(sf.eval(&rat_int(-2)).is_zero());
        assert_eq!(sf.degree(), Some(2));
    }

    #[test]
    fn leading_coeff_monic_cases() {
        let f = af(&[&[0, -1], &[], &[1]]); // Y^2 - z
        let rep = leading_coeff_check(&f).unwrap();
        assert!(rep.monic_normalizable);
        assert!(rep.disk10_bound.unwrap() >= rat_int(10));

        let g = af(&[&[1], &[1], &[0, 1]]); // zY^2 + Y + 1
        let rep = leading_coeff_check(&g).unwrap();
        assert!(!rep.monic_normalizable);
        assert_eq!(rep.indeterminacy_points.len(), 1);
        assert_eq!(
            rep.indeterminacy_points[0].exact_rational(),
            Some(rat_int(0))
        );

        let h = af(&[&[1], &[0, 1], &[1]]); // Y^2 + zY + 1
        assert!(leading_coeff_check(&h).unwrap().monic_normalizable);
    }

    #[test]
    fn branch_values_match_numeric_roots() {
        // Evaluate every conjugate of every cycle at a small parameter and
        // compare the multiset against independently computed roots of the
        // specialized polynomial.
        use num_traits::ToPrimitive;
        let cases: Vec<Vec<Vec<i64>>> = vec![
            vec![vec![0, -1], vec![], vec![1]],
            vec![vec![0, -1], vec![], vec![], vec![1]],
            vec![vec![0, 1, -1], vec![], vec![1]],
            vec![vec![0, 0, 0, 1], vec![0, 2], vec![1]],
            vec![vec![0, 0, -1, -1], vec![], vec![1]],
            vec![vec![0, 1], vec![0, -3], vec![], vec![1]],
            vec![vec![1], vec![1], vec![0, 1]],
            vec![vec![0, 0, -1, -1], vec![], vec![], vec![], vec![1]],
        ];
        let t0_rat = crate::scalar::rat(1, 65536);
        let t0 = t0_rat.to_f64().unwrap();
        for coeffs in cases {
            let refs: Vec<&[i64]> = coeffs.iter().map(Vec::as_slice).collect();
            let f = af(&refs);
            let cycles = newton_puiseux(&f, &Center::Rational(rat_int(0)), 10).unwrap();
            let mut predicted: Vec<num_complex::Complex64> = Vec::new();
            for c in &cycles {
                let n = c.ramification;
                let tau0 = t0.powf(1.0 / f64::from(n));
                for k in 0..n {
                    let angle = 2.0 * std::f64::consts::PI * f64::from(k) / f64::from(n);
                    let tau = num_complex::Complex64::from_polar(tau0, angle);
                    let mut v = num_complex::Complex64::new(0.0, 0.0);
                    for (i, q) in &c.terms {
                        v += q.to_complex(&c.delta) * tau.powi(*i as i32);
                    }
                    predicted.push(v);
                }
            }
            let actual = locus::durand_kerner(&f.specialize(&t0_rat), 2000);
            assert_eq!(predicted.len(), actual.len());
            let scale = 1.0 + actual.iter().map(|a| a.norm()).fold(0.0f64, f64::max);
            let mut used = vec![false; actual.len()];
            for p in &predicted {
                let mut best = None;
                let mut best_dist = f64::INFINITY;
                for (j, a) in actual.iter().enumerate() {
                    if used[j] {
                        continue;
                    }
                    let dist = (p - a).norm();
                    if dist < best_dist {
                        best_dist = dist;
                        best = Some(j);
                    }
                }
                let j = best.expect("root available");
                assert!(
                    best_dist < 1e-4 * scale,
                    "branch value {p} is {best_dist} away from nearest root (scale {scale})"
                );
                used[j] = true;
            }
        }
    }

    #[test]
    fn disk_bound_holds_on_sampled_roots() {
        use num_traits::ToPrimitive;
        // monic cases: every branch value on |z| <= 10 stays within the
        // reported bound
        for coeffs in [
            vec![vec![0i64, -1], vec![], vec![1]],
            vec![vec![1], vec![0, 1], vec![1]],
            vec![vec![0, 0, 0, 1], vec![0, 2], vec![1]],
        ] {
            let refs: Vec<&[i64]> = coeffs.iter().map(Vec::as_slice).collect();
            let f = af(&refs);
            let report = leading_coeff_check(&f).unwrap();
            let bound = report.disk10_bound.unwrap().to_f64().unwrap();
            for k in 0..24 {
                let angle = 2.0 * std::f64::consts::PI * f64::from(k) / 24.0;
                let radius = 10.0 * f64::from(k % 5 + 1) / 5.0;
                let z = num_complex::Complex64::from_polar(radius, angle);
                let specialized: Vec<num_complex::Complex64> = f
                    .coeffs()
                    .iter()
                    .map(|c| {
                        let mut acc = num_complex::Complex64::new(0.0, 0.0);
                        for x in c.coeffs().iter().rev() {
                            acc = acc * z + x.to_f64().unwrap();
                        }
                        acc
                    })
                    .collect();
                let poly = qpoly_from_complex_roots_check(&specialized);
                for root in poly {
                    assert!(
                        root.norm() <= bound + 1e-6,
                        "root {root} exceeds bound {bound}"
                    );
                }
            }
        }
    }

    fn qpoly_from_complex_roots_check(
        coeffs: &[num_complex::Complex64],
    ) -> Vec<num_complex::Complex64> {
        // naive Durand–Kerner on the specialized polynomial
        let d = coeffs.len() - 1;
        let lead = coeffs[d];
        let monic: Vec<_> = coeffs.iter().map(|c| c / lead).collect();
        let eval = |z: num_complex::Complex64| {
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            for c in monic.iter().rev() {
                acc = acc * z + c;
            }
            acc
        };
        let seed = num_complex::Complex64::new(0.4, 0.9);
        let mut roots: Vec<_> = (0..d).map(|k| seed.powu(k as u32 + 1)).collect();
        for _ in 0..200 {
            for i in 0..d {
                let mut denom = num_complex::Complex64::new(1.0, 0.0);
                for j in 0..d {
                    if i != j {
                        denom *= roots[i] - roots[j];
                    }
                }
                if denom.norm() > 0.0 {
                    let delta = eval(roots[i]) / denom;
                    roots[i] -= delta;
                }
            }
        }
        roots
    }

    #[test]
    fn branch_relation_examples() {
        let b = QBasis::with_sqrt(rat_int(2)).unwrap();
        let one = QModReal::from_rational(&b, rat_int(1));
        let two = QModReal::from_rational(&b, rat_int(2));
        let sqrt2 = QModReal::new(b.clone(), vec![rat_int(0), rat_int(1)]).unwrap();

        // mu = (1, 2), i2 = -1, N0 = 2: 1*2 = 2*1 holds
        let r = derive_branch_relation(&[-1], 2, &[one.clone(), two]).unwrap();
        assert_eq!(r.n1, 2);
        assert_eq!(r.n_rest, vec![1]);
        assert!(r.holds);

        // mu = (1, sqrt2), i2 = -1, N0 = 1: 1 vs sqrt2 fails
        let r = derive_branch_relation(&[-1], 1, &[one, sqrt2.clone()]).unwrap();
        assert!(!r.holds);

        // mu = (sqrt2 + 1/4, 1/4), i2 = -2, N0 = 1 fails
        let mu1 = QModReal::new(b.clone(), vec![crate::scalar::rat(1, 4), rat_int(1)]).unwrap();
        let mu2 = QModReal::new(b, vec![crate::scalar::rat(1, 4), rat_int(0)]).unwrap();
        let r = derive_branch_relation(&[-2], 1, &[mu1, mu2]).unwrap();
        assert!(!r.holds);
    }
}
