//! Exact coefficient field for expansions: the rationals, optionally
//! extended by one square root `sqrt(delta)` with `delta` a (possibly
//! negative) rational. Gaussian rationals are the case `delta = -1`.
//!
//! The extension is installed lazily by the first `sqrt` that needs it;
//! a second incompatible square root is a field-tower failure that callers
//! surface as `UnsupportedCoefficientField`.

use num_traits::{One, Zero};

use crate::scalar::{format_rational, rational_sqrt, Rational};

/// `a + b * sqrt(delta)` relative to the ambient [`ExtField`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quad {
    pub a: Rational,
    pub b: Rational,
}

impl Quad {
    pub fn rational(a: Rational) -> Self {
        Quad {
            a,
            b: Rational::zero(),
        }
    }

    pub fn zero() -> Self {
        Quad::rational(Rational::zero())
    }

    pub fn one() -> Self {
        Quad::rational(Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.b.is_zero().then_some(&self.a)
    }

    pub fn describe(&self, delta: &Option<Rational>) -> String {
        match (&self.b, delta) {
            (b, _) if b.is_zero() => format_rational(&self.a),
            (b, Some(d)) if self.a.is_zero() => {
                format!("{}*sqrt({})", format_rational(b), format_rational(d))
            }
            (b, Some(d)) => format!(
                "{} + {}*sqrt({})",
                format_rational(&self.a),
                format_rational(b),
                format_rational(d)
            ),
            (b, None) => format!(
                "{} + {}*sqrt(?)",
                format_rational(&self.a),
                format_rational(b)
            ),
        }
    }

    /// Numeric value as a complex number, given the ambient radicand.
    pub fn to_complex(&self, delta: &Option<Rational>) -> num_complex::Complex64 {
        use num_traits::ToPrimitive;
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        match delta {
            None => num_complex::Complex64::new(a, 0.0),
            Some(d) => {
                let dv = d.to_f64().unwrap_or(f64::NAN);
                if dv >= 0.0 {
                    num_complex::Complex64::new(a + b * dv.sqrt(), 0.0)
                } else {
                    num_complex::Complex64::new(a, b * (-dv).sqrt())
                }
            }
        }
    }
}

/// Ambient field context: `Q` when `delta` is unset, `Q(sqrt(delta))` after
/// the first genuine square root is taken.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExtField {
    pub delta: Option<Rational>,
}

impl ExtField {
    pub fn rational_field() -> Self {
        ExtField { delta: None }
    }

    pub fn add(&self, x: &Quad, y: &Quad) -> Quad {
        Quad {
            a: &x.a + &y.a,
            b: &x.b + &y.b,
        }
    }

    pub fn sub(&self, x: &Quad, y: &Quad) -> Quad {
        Quad {
            a: &x.a - &y.a,
            b: &x.b - &y.b,
        }
    }

    pub fn neg(&self, x: &Quad) -> Quad {
        Quad {
            a: -x.a.clone(),
            b: -x.b.clone(),
        }
    }

    pub fn mul(&self, x: &Quad, y: &Quad) -> Quad {
        let cross = &x.a * &y.b + &x.b * &y.a;
        let mut a = &x.a * &y.a;
        if !x.b.is_zero() && !y.b.is_zero() {
            let d = self
                .delta
                .as_ref()
                .expect("nonzero sqrt parts require an installed extension");
            a += &x.b * &y.b * d;
        }
        Quad { a, b: cross }
    }

    pub fn scale(&self, x: &Quad, c: &Rational) -> Quad {
        Quad {
            a: &x.a * c,
            b: &x.b * c,
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, x: &Quad) -> Option<Quad> {
        if x.is_zero() {
            return None;
        }
        if x.b.is_zero() {
            return Some(Quad::rational(x.a.recip()));
        }
        let d = self.delta.as_ref().expect("sqrt part without extension");
        let norm = &x.a * &x.a - &x.b * &x.b * d;
        // norm = 0 would mean delta is a perfect square, which sqrt() never installs
        Some(Quad {
            a: &x.a / &norm,
            b: -&x.b / &norm,
        })
    }

    pub fn div(&self, x: &Quad, y: &Quad) -> Option<Quad> {
        Some(self.mul(x, &self.inv(y)?))
    }

    pub fn pow(&self, x: &Quad, k: u32) -> Quad {
        let mut acc = Quad::one();
        for _ in 0..k {
            acc = self.mul(&acc, x);
        }
        acc
    }

    /// Exact square root within the (possibly extended) field.
    ///
    /// May install the extension when the field is still rational; returns
    /// `None` when the root genuinely leaves the quadratic tower.
    pub fn sqrt(&mut self, x: &Quad) -> Option<Quad> {
        if x.is_zero() {
            return Some(Quad::zero());
        }
        if x.b.is_zero() {
            let v = &x.a;
            if let Some(s) = rational_sqrt(v) {
                return Some(Quad::rational(s));
            }
            match &self.delta {
                None => {
                    self.delta = Some(v.clone());
                    Some(Quad {
                        a: Rational::zero(),
                        b: Rational::one(),
                    })
                }
                Some(d) => {
                    // sqrt(v) = t*sqrt(d) iff v*d is a perfect square
                    let prod = v * d;
                    rational_sqrt(&prod).map(|s| Quad {
                        a: Rational::zero(),
                        b: s / d,
                    })
                }
            }
        } else {
            // (p + q*sqrt(d))^2 = a + b*sqrt(d) requires
            // p^2 + q^2 d = a, 2pq = b, so p^2 = (a ± sqrt(a^2 - b^2 d))/2.
            let d = self.delta.as_ref().expect("sqrt part without extension");
            let norm = &x.a * &x.a - &x.b * &x.b * d;
            let s = rational_sqrt(&norm)?;
            let two = Rational::from_integer(2.into());
            for sign in [Rational::one(), -Rational::one()] {
                let p2 = (&x.a + &sign * &s) / &two;
                if let Some(p) = rational_sqrt(&p2) {
                    if !p.is_zero() {
                        let q = &x.b / (&two * &p);
                        return Some(Quad { a: p, b: q });
                    }
                }
            }
            None
        }
    }

    /// Exact `w`-th root within the tower: repeated square roots for the
    /// even part, then a rational odd root. Conservative: a root that
    /// exists in the tower through another route may still return `None`.
    pub fn nth_root(&mut self, x: &Quad, w: u32) -> Option<Quad> {
        assert!(w >= 1);
        if w == 1 {
            return Some(x.clone());
        }
        let mut odd = w;
        let mut halvings = 0u32;
        while odd.is_multiple_of(2) {
            odd /= 2;
            halvings += 1;
        }
        let mut cur = if odd == 1 {
            x.clone()
        } else {
            let v = x.as_rational()?;
            Quad::rational(rational_odd_root(v, odd)?)
        };
        for _ in 0..halvings {
            cur = self.sqrt(&cur)?;
        }
        Some(cur)
    }
}

fn rational_odd_root(v: &Rational, k: u32) -> Option<Rational> {
    let n = v.numer();
    let d = v.denom();
    let rn = n.nth_root(k);
    let rd = d.nth_root(k);
    let mut p = Rational::one();
    for _ in 0..k {
        p *= Rational::new(rn.clone(), rd.clone());
    }
    (&p == v).then(|| Rational::new(rn.clone(), rd.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    #[test]
    fn sqrt_installs_extension() {
        let mut f = ExtField::rational_field();
        let r = f.sqrt(&Quad::rational(rat_int(2))).unwrap();
        assert_eq!(f.delta, Some(rat_int(2)));
        assert_eq!(f.mul(&r, &r), Quad::rational(rat_int(2)));
    }

    #[test]
    fn sqrt_negative_is_complex() {
        let mut f = ExtField::rational_field();
        let i = f.sqrt(&Quad::rational(rat_int(-1))).unwrap();
        assert_eq!(f.delta, Some(rat_int(-1)));
        assert_eq!(f.mul(&i, &i), Quad::rational(rat_int(-1)));
    }

    #[test]
    fn compatible_second_sqrt() {
        let mut f = ExtField::rational_field();
        let s8 = f.sqrt(&Quad::rational(rat_int(8))).unwrap();
        let s2 = f.sqrt(&Quad::rational(rat_int(2))).unwrap();
        // sqrt(8) = 2*sqrt(2)
        assert_eq!(s8, f.scale(&s2, &rat_int(2)));
    }

    #[test]
    fn incompatible_sqrt_rejected() {
        let mut f = ExtField::rational_field();
        f.sqrt(&Quad::rational(rat_int(2))).unwrap();
        assert!(f.sqrt(&Quad::rational(rat_int(3))).is_none());
    }

    #[test]
    fn sqrt_of_extension_element() {
        // sqrt(3 + 2*sqrt(2)) = 1 + sqrt(2)
        let mut f = ExtField::rational_field();
        f.sqrt(&Quad::rational(rat_int(2))).unwrap();
        let x = Quad {
            a: rat_int(3),
            b: rat_int(2),
        };
        let r = f.sqrt(&x).unwrap();
        assert_eq!(f.mul(&r, &r), x);
    }

    #[test]
    fn inverse_round_trip() {
        let mut f = ExtField::rational_field();
        f.sqrt(&Quad::rational(rat_int(-3))).unwrap();
        let x = Quad {
            a: rat(1, 2),
            b: rat(-2, 5),
        };
        let inv = f.inv(&x).unwrap();
        assert_eq!(f.mul(&x, &inv), Quad::one());
    }

    #[test]
    fn nth_roots() {
        let mut f = ExtField::rational_field();
        assert_eq!(
            f.nth_root(&Quad::rational(rat_int(8)), 3),
            Some(Quad::rational(rat_int(2)))
        );
        assert_eq!(
            f.nth_root(&Quad::rational(rat_int(-8)), 3),
            Some(Quad::rational(rat_int(-2)))
        );
        let r = f.nth_root(&Quad::rational(rat_int(4)), 4).unwrap();
        assert_eq!(f.pow(&r, 4), Quad::rational(rat_int(4)));
        assert_eq!(f.nth_root(&Quad::rational(rat_int(2)), 3), None);
    }
}
