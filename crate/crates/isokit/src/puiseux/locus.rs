//! Branch locus computation: exact isolation of the roots of the
//! discriminant resultant and of the leading coefficient.
//!
//! Real roots are isolated by Sturm sequences. Non-real roots are located
//! numerically and then certified exactly: a Rouché-style dominance test at
//! a Gaussian-rational center, in pure rational arithmetic, pins exactly
//! one root inside each disk, and conjugate symmetry plus the real count
//! accounts for every root.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::newton::newton_puiseux;
use super::qpoly::{isolate_real_roots, rational_roots, refine_root, QPoly};
use super::{AlgebraicFunction, Center, PuiseuxError};
use crate::scalar::Rational;

/// One isolated point of the branch locus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocusPoint {
    /// Square-free polynomial over Q annihilating the point (the minimal
    /// polynomial whenever this is linear).
    pub annihilator: QPoly,
    /// Real part enclosure.
    pub re: (Rational, Rational),
    /// Imaginary part enclosure.
    pub im: (Rational, Rational),
}

impl LocusPoint {
    pub fn exact_rational(&self) -> Option<Rational> {
        (self.re.0 == self.re.1 && self.im.0.is_zero() && self.im.1.is_zero())
            .then(|| self.re.0.clone())
    }

    pub fn is_real(&self) -> bool {
        self.im.0.is_zero() && self.im.1.is_zero()
    }

    pub fn approx(&self) -> Complex64 {
        let mid = |p: &(Rational, Rational)| {
            ((&p.0 + &p.1) / Rational::from_integer(2.into()))
                .to_f64()
                .unwrap_or(f64::NAN)
        };
        Complex64::new(mid(&self.re), mid(&self.im))
    }

    pub fn describe(&self) -> String {
        if let Some(r) = self.exact_rational() {
            return crate::scalar::format_rational(&r);
        }
        format!(
            "re in [{}, {}], im in [{}, {}] (root of {})",
            crate::scalar::format_rational(&self.re.0),
            crate::scalar::format_rational(&self.re.1),
            crate::scalar::format_rational(&self.im.0),
            crate::scalar::format_rational(&self.im.1),
            self.annihilator.to_display("z")
        )
    }
}

#[derive(Debug, Clone)]
pub struct BranchLocus {
    pub points: Vec<LocusPoint>,
    pub includes_infinity: bool,
}

/// Isolate all roots of the discriminant resultant and of the leading
/// coefficient; flag infinity when the expansion there is ramified.
pub fn branch_locus(f: &AlgebraicFunction) -> Result<BranchLocus, PuiseuxError> {
    let disc = f.discriminant_poly();
    if disc.is_zero() {
        return Err(PuiseuxError::NotSquareFree);
    }
    let product = disc.mul(f.leading());
    let points = isolate_poly_roots(&product.squarefree_part())?;
    let at_infinity = newton_puiseux(f, &Center::Infinity, 2)?;
    let includes_infinity = at_infinity.iter().any(|c| c.ramification >= 2);
    Ok(BranchLocus {
        points,
        includes_infinity,
    })
}

/// Exact isolation of all complex roots of a square-free rational
/// polynomial.
pub fn isolate_poly_roots(sf: &QPoly) -> Result<Vec<LocusPoint>, PuiseuxError> {
    let mut points = Vec::new();
    if sf.is_constant() {
        return Ok(points);
    }
    let mut rest = sf.clone();
    if let Some(rats) = rational_roots(sf) {
        for (r, mult) in rats {
            debug_assert_eq!(mult, 1);
            points.push(LocusPoint {
                annihilator: QPoly::linear_root(&r),
                re: (r.clone(), r.clone()),
                im: (Rational::zero(), Rational::zero()),
            });
            let (q, rem) = rest.div_rem(&QPoly::linear_root(&r));
            debug_assert!(rem.is_zero());
            rest = q;
        }
    }
    if rest.is_constant() {
        return Ok(points);
    }
    let width = Rational::new(BigInt::one(), BigInt::from(1u64 << 20));
    let reals = isolate_real_roots(&rest);
    for root in &reals {
        let refined = refine_root(&rest, root, &width);
        let (lo, hi) = refined.bounds();
        points.push(LocusPoint {
            annihilator: rest.clone(),
            re: (lo, hi),
            im: (Rational::zero(), Rational::zero()),
        });
    }
    let deg = rest.degree().unwrap();
    let missing = deg - reals.len();
    if missing > 0 {
        let pairs = certify_complex_pairs(&rest, missing / 2)?;
        for (center, radius) in pairs {
            let re = (&center.re - &radius, &center.re + &radius);
            let im_hi = (&center.im + &radius).clone();
            let im_lo = (&center.im - &radius).clone();
            points.push(LocusPoint {
                annihilator: rest.clone(),
                re: re.clone(),
                im: (im_lo.clone(), im_hi.clone()),
            });
            points.push(LocusPoint {
                annihilator: rest.clone(),
                re,
                im: (-im_hi, -im_lo),
            });
        }
    }
    points.sort_by_key(|a| (a.re.0.clone(), a.im.0.clone()));
    Ok(points)
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct GaussRat {
    re: Rational,
    im: Rational,
}

impl GaussRat {
    fn zero() -> Self {
        GaussRat {
            re: Rational::zero(),
            im: Rational::zero(),
        }
    }

    fn add(&self, o: &Self) -> Self {
        GaussRat {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    fn sub(&self, o: &Self) -> Self {
        GaussRat {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    fn mul(&self, o: &Self) -> Self {
        GaussRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn div(&self, o: &Self) -> Self {
        let norm = &o.re * &o.re + &o.im * &o.im;
        GaussRat {
            re: (&self.re * &o.re + &self.im * &o.im) / &norm,
            im: (&self.im * &o.re - &self.re * &o.im) / &norm,
        }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// Upper bound on the modulus (L1).
    fn mag_upper(&self) -> Rational {
        self.re.abs() + self.im.abs()
    }

    /// Lower bound on the modulus (L-infinity).
    fn mag_lower(&self) -> Rational {
        self.re.abs().max(self.im.abs())
    }

    fn round(&self, denom_log2: u32) -> Self {
        let d = BigInt::from(1u8) << denom_log2;
        let r = |x: &Rational| {
            let scaled = x * Rational::from_integer(d.clone());
            Rational::new(scaled.round().to_integer(), d.clone())
        };
        GaussRat {
            re: r(&self.re),
            im: r(&self.im),
        }
    }
}

fn eval_gauss(p: &QPoly, z: &GaussRat) -> GaussRat {
    let mut acc = GaussRat::zero();
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(z);
        acc.re += c;
    }
    acc
}

/// Taylor-shift coefficients `p(z0 + w)` over the Gaussian rationals.
fn shift_gauss(p: &QPoly, z0: &GaussRat) -> Vec<GaussRat> {
    let n = p.coeffs().len();
    let mut out: Vec<GaussRat> = vec![GaussRat::zero(); n];
    for c in p.coeffs().iter().rev() {
        // out = out * (z0 + w) + c, as a polynomial in w
        let mut next = vec![GaussRat::zero(); n];
        for (k, o) in out.iter().enumerate() {
            if o.is_zero() {
                continue;
            }
            next[k] = next[k].add(&o.mul(z0));
            if k + 1 < n {
                next[k + 1] = next[k + 1].add(o);
            }
        }
        next[0].re += c;
        out = next;
    }
    out
}

/// Rouché dominance of the linear term on `|w| = rho`: exactly one root of
/// `p` lies in the open disk around `z0`.
fn pellet_one_root(shifted: &[GaussRat], rho: &Rational) -> bool {
    let lin = shifted[1].mag_lower() * rho;
    let mut rest = shifted[0].mag_upper();
    let mut rp = rho * rho;
    for g in &shifted[2..] {
        rest += g.mag_upper() * &rp;
        rp *= rho;
    }
    lin > rest
}

/// Find and certify `count` root disks in the open upper half plane.
fn certify_complex_pairs(
    sf: &QPoly,
    count: usize,
) -> Result<Vec<(GaussRat, Rational)>, PuiseuxError> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let deriv = sf.derivative();
    for attempt in 0..4 {
        let iterations = 300 << attempt;
        let approx = durand_kerner(sf, iterations);
        let mut upper: Vec<Complex64> = approx.iter().filter(|z| z.im > 1e-9).cloned().collect();
        upper.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        if upper.len() != count {
            continue;
        }
        let mut disks: Vec<(GaussRat, Rational)> = Vec::new();
        let mut ok = true;
        for z in &upper {
            let mut zr = GaussRat {
                re: f64_to_rational(z.re, 30),
                im: f64_to_rational(z.im, 30),
            };
            // exact Newton polish with denominator control
            for _ in 0..3 {
                let fv = eval_gauss(sf, &zr);
                let dv = eval_gauss(&deriv, &zr);
                if dv.is_zero() {
                    break;
                }
                zr = zr.sub(&fv.div(&dv)).round(120);
            }
            let shifted = shift_gauss(sf, &zr);
            let mut cert: Option<Rational> = None;
            for k in (4..=100u32).rev() {
                let rho = Rational::new(BigInt::one(), BigInt::from(1u128) << k);
                if pellet_one_root(&shifted, &rho) {
                    cert = Some(rho);
                    break;
                }
            }
            match cert {
                Some(rho) if zr.im > rho => disks.push((zr, rho)),
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        // pairwise disjointness, exact
        let mut disjoint = true;
        for i in 0..disks.len() {
            for j in (i + 1)..disks.len() {
                let dz = disks[i].0.sub(&disks[j].0);
                let dist2 = &dz.re * &dz.re + &dz.im * &dz.im;
                let rsum = &disks[i].1 + &disks[j].1;
                if dist2 <= &rsum * &rsum {
                    disjoint = false;
                }
            }
        }
        if disjoint {
            return Ok(disks);
        }
    }
    Err(PuiseuxError::IsolationFailed(
        "could not certify disjoint complex root disks".into(),
    ))
}

fn f64_to_rational(x: f64, denom_log2: u32) -> Rational {
    let d = (1u64 << denom_log2) as f64;
    let scaled = (x * d).round();
    Rational::new(
        BigInt::from(scaled as i128),
        BigInt::from(1u64 << denom_log2),
    )
}

/// Durand–Kerner simultaneous root iteration in f64.
pub(crate) fn durand_kerner(p: &QPoly, iterations: usize) -> Vec<Complex64> {
    let d = p.degree().unwrap_or(0);
    if d == 0 {
        return Vec::new();
    }
    let coeffs: Vec<Complex64> = p
        .coeffs()
        .iter()
        .map(|c| Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0))
        .collect();
    let lead = coeffs[d];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let eval = |z: Complex64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in monic.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    let radius = 1.0 + monic[..d].iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..d)
        .map(|k| radius * 0.7 * seed.powu(k as u32 + 1) / seed.norm().powi(k as i32))
        .collect();
    for _ in 0..iterations {
        let mut moved = 0.0f64;
        for i in 0..d {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                roots[i] += Complex64::new(1e-6, 1e-6);
                continue;
            }
            let delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            moved = moved.max(delta.norm());
        }
        if moved < 1e-14 {
            break;
        }
    }
    roots
}
