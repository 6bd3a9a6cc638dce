//! Gram-matrix algebra for polarized potentials `1 + F(z)·F̄(xi)`.
//!
//! Potentials are stored as rational Gram matrices over z-monomials; square
//! roots are confined to map coefficients as `r*sqrt(q)` tags, so every
//! verification step stays in exact rational arithmetic.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::scalar::{format_rational, rational_sqrt, QModReal, RadicalSum, Rational, ScalarError};
use crate::series::{Exponents, PolarizedSeries};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HermitianError {
    #[error("map coefficients produce an irrational Gram entry at ({0}, {1})")]
    IrrationalGramEntry(String, String),
    #[error("input Gram data is not symmetric at ({0}, {1})")]
    AsymmetricInput(String, String),
    #[error("potential must have constant term 1, got {0}")]
    NonUnitConstantTerm(String),
    #[error("potential must have positive constant term, got {0}")]
    NonPositiveConstantTerm(String),
    #[error("divisor form must be non-constant")]
    ConstantDivisor,
    #[error("no pure-power factorization: {0}")]
    NotAPurePower(String),
    #[error("forms disagree on the number of variables")]
    DimensionMismatch,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// One coefficient `r * sqrt(q)` of a polynomial map component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapCoeff {
    pub rational: Rational,
    /// Radicand of an optional square-root tag; always positive, never a
    /// perfect square after normalization.
    pub sqrt: Option<Rational>,
}

impl MapCoeff {
    pub fn new(rational: Rational, sqrt: Option<Rational>) -> Self {
        let mut c = MapCoeff { rational, sqrt };
        c.normalize();
        c
    }

    pub fn rational(r: Rational) -> Self {
        MapCoeff::new(r, None)
    }

    fn normalize(&mut self) {
        if self.rational.is_zero() {
            self.sqrt = None;
            return;
        }
        if let Some(q) = &self.sqrt {
            if let Some(s) = rational_sqrt(q) {
                self.rational *= s;
                self.sqrt = None;
            }
        }
    }

    fn radicand(&self) -> Rational {
        self.sqrt.clone().unwrap_or_else(Rational::one)
    }
}

impl fmt::Display for MapCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.sqrt {
            None => write!(f, "{}", format_rational(&self.rational)),
            Some(q) => write!(
                f,
                "{}*sqrt({})",
                format_rational(&self.rational),
                format_rational(q)
            ),
        }
    }
}

/// One polynomial component of a map, as z-exponent -> coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MapComponent {
    pub terms: BTreeMap<Vec<u32>, MapCoeff>,
}

impl MapComponent {
    pub fn monomial(exponent: Vec<u32>, coeff: MapCoeff) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.rational.is_zero() {
            terms.insert(exponent, coeff);
        }
        MapComponent { terms }
    }

    pub fn vanishes_at_origin(&self, n: usize) -> bool {
        !self.terms.contains_key(&vec![0; n])
    }
}

/// A tuple of polynomial maps `U in C^n -> C^N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapTuple {
    pub n: usize,
    pub components: Vec<MapComponent>,
}

impl MapTuple {
    pub fn new(n: usize, components: Vec<MapComponent>) -> Self {
        MapTuple { n, components }
    }

    pub fn empty(n: usize) -> Self {
        MapTuple {
            n,
            components: Vec::new(),
        }
    }

    /// The identity embedding `z -> (z_1, ..., z_n)`.
    pub fn identity(n: usize) -> Self {
        let components = (0..n)
            .map(|i| {
                let mut e = vec![0u32; i];
                e.push(1);
                e.resize(n, 0);
                MapComponent::monomial(e, MapCoeff::rational(Rational::one()))
            })
            .collect();
        MapTuple { n, components }
    }

    pub fn target_dim(&self) -> usize {
        self.components.len()
    }

    pub fn vanishes_at_origin(&self) -> bool {
        self.components.iter().all(|c| c.vanishes_at_origin(self.n))
    }
}

/// Polarized potential as an exact Gram matrix over z-monomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermitianForm {
    n: usize,
    monomials: Vec<Vec<u32>>,
    gram: Vec<Vec<Rational>>,
}

impl HermitianForm {
    /// Build from sparse entries, keeping the constant monomial and any
    /// monomial with a nonzero row or column.
    pub fn from_entries(
        n: usize,
        entries: &BTreeMap<(Vec<u32>, Vec<u32>), Rational>,
    ) -> Result<Self, HermitianError> {
        let mut monomials: std::collections::BTreeSet<Vec<u32>> = std::collections::BTreeSet::new();
        monomials.insert(vec![0; n]);
        for ((a, b), c) in entries {
            if !c.is_zero() {
                monomials.insert(a.clone());
                monomials.insert(b.clone());
            }
        }
        let monomials: Vec<Vec<u32>> = monomials.into_iter().collect();
        let index: BTreeMap<&Vec<u32>, usize> =
            monomials.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let k = monomials.len();
        let mut gram = vec![vec![Rational::zero(); k]; k];
        for ((a, b), c) in entries {
            if c.is_zero() {
                continue;
            }
            gram[index[a]][index[b]] += c;
        }
        for i in 0..k {
            for j in (i + 1)..k {
                if gram[i][j] != gram[j][i] {
                    return Err(HermitianError::AsymmetricInput(
                        monomial_name(&monomials[i], "z"),
                        monomial_name(&monomials[j], "xi"),
                    ));
                }
            }
        }
        Ok(HermitianForm { n, monomials, gram })
    }

    /// The constant form with value `c`.
    pub fn constant(n: usize, c: Rational) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert((vec![0; n], vec![0; n]), c);
        HermitianForm::from_entries(n, &entries).expect("constant form")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn monomials(&self) -> &[Vec<u32>] {
        &self.monomials
    }

    pub fn gram(&self) -> &[Vec<Rational>] {
        &self.gram
    }

    pub fn constant_term(&self) -> Rational {
        let zero = vec![0; self.n];
        self.entry(&zero, &zero)
    }

    pub fn entry(&self, a: &[u32], b: &[u32]) -> Rational {
        let ia = self.monomials.iter().position(|m| m[..] == *a);
        let ib = self.monomials.iter().position(|m| m[..] == *b);
        match (ia, ib) {
            (Some(i), Some(j)) => self.gram[i][j].clone(),
            _ => Rational::zero(),
        }
    }

    pub fn entries(&self) -> BTreeMap<(Vec<u32>, Vec<u32>), Rational> {
        let mut out = BTreeMap::new();
        for (i, a) in self.monomials.iter().enumerate() {
            for (j, b) in self.monomials.iter().enumerate() {
                if !self.gram[i][j].is_zero() {
                    out.insert((a.clone(), b.clone()), self.gram[i][j].clone());
                }
            }
        }
        out
    }

    /// Maximum total degree of a term `z^a xi^b` of the potential.
    pub fn max_total_degree(&self) -> u32 {
        let mut d = 0;
        for (i, a) in self.monomials.iter().enumerate() {
            for (j, b) in self.monomials.iter().enumerate() {
                if !self.gram[i][j].is_zero() {
                    d = d.max(a.iter().sum::<u32>() + b.iter().sum::<u32>());
                }
            }
        }
        d
    }

    pub fn is_constant(&self) -> bool {
        self.max_total_degree() == 0
    }

    pub fn to_series(&self, order: u32) -> PolarizedSeries {
        let mut s = PolarizedSeries::zero(self.n, order);
        for (i, a) in self.monomials.iter().enumerate() {
            for (j, b) in self.monomials.iter().enumerate() {
                if !self.gram[i][j].is_zero() {
                    s.add_term(
                        Exponents {
                            z_exp: a.clone(),
                            xi_exp: b.clone(),
                        },
                        self.gram[i][j].clone(),
                    );
                }
            }
        }
        s
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let entries = self
            .entries()
            .into_iter()
            .map(|(k, v)| (k, v * c))
            .collect();
        HermitianForm::from_entries(self.n, &entries).expect("scaled form stays symmetric")
    }

    /// Reinterpret over a larger variable count by zero-padding exponents.
    pub fn pad_to(&self, n: usize) -> Self {
        if n <= self.n {
            return self.clone();
        }
        let entries = self
            .entries()
            .into_iter()
            .map(|((mut a, mut b), v)| {
                a.resize(n, 0);
                b.resize(n, 0);
                ((a, b), v)
            })
            .collect();
        HermitianForm::from_entries(n, &entries).expect("padding preserves symmetry")
    }
}

fn monomial_name(exp: &[u32], var: &str) -> String {
    let mut parts = Vec::new();
    for (i, &p) in exp.iter().enumerate() {
        match p {
            0 => {}
            1 => parts.push(format!("{}{}", var, i + 1)),
            _ => parts.push(format!("{}{}^{}", var, i + 1, p)),
        }
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

/// `1 + F(z)·F̄(xi)` as an exact Gram matrix.
///
/// A Gram entry is the sum over components of products of coefficient tags;
/// each product `r1*sqrt(q1) * r2*sqrt(q2)` is rational exactly when `q1*q2`
/// is a perfect rational square. Anything irrational left over is an error.
pub fn form_from_map(map: &MapTuple) -> Result<HermitianForm, HermitianError> {
    let n = map.n;
    let mut sums: BTreeMap<(Vec<u32>, Vec<u32>), RadicalSum> = BTreeMap::new();
    for comp in &map.components {
        for (ea, ca) in &comp.terms {
            for (eb, cb) in &comp.terms {
                let key = (ea.clone(), eb.clone());
                let coeff = &ca.rational * &cb.rational;
                let radicand = ca.radicand() * cb.radicand();
                sums.entry(key)
                    .or_insert_with(RadicalSum::zero)
                    .push_sqrt(coeff, &radicand);
            }
        }
    }
    let mut entries: BTreeMap<(Vec<u32>, Vec<u32>), Rational> = BTreeMap::new();
    for ((a, b), s) in sums {
        match s.as_rational() {
            Some(r) => {
                if !r.is_zero() {
                    entries.insert((a, b), r);
                }
            }
            None => {
                return Err(HermitianError::IrrationalGramEntry(
                    monomial_name(&a, "z"),
                    monomial_name(&b, "xi"),
                ))
            }
        }
    }
    *entries
        .entry((vec![0; n], vec![0; n]))
        .or_insert_with(Rational::zero) += Rational::one();
    HermitianForm::from_entries(n, &entries)
}

/// Pointwise product of two polarized potentials.
pub fn form_product(p: &HermitianForm, q: &HermitianForm) -> Result<HermitianForm, HermitianError> {
    if p.n != q.n {
        return Err(HermitianError::DimensionMismatch);
    }
    let mut entries: BTreeMap<(Vec<u32>, Vec<u32>), Rational> = BTreeMap::new();
    for ((a1, b1), c1) in p.entries() {
        for ((a2, b2), c2) in q.entries() {
            let a: Vec<u32> = a1.iter().zip(&a2).map(|(x, y)| x + y).collect();
            let b: Vec<u32> = b1.iter().zip(&b2).map(|(x, y)| x + y).collect();
            let e = entries.entry((a, b)).or_insert_with(Rational::zero);
            *e += &c1 * &c2;
        }
    }
    entries.retain(|_, v| !v.is_zero());
    HermitianForm::from_entries(p.n, &entries)
}

pub fn form_pow(p: &HermitianForm, k: u32) -> Result<HermitianForm, HermitianError> {
    let mut acc = HermitianForm::constant(p.n, Rational::one());
    for _ in 0..k {
        acc = form_product(&acc, p)?;
    }
    Ok(acc)
}

fn multinomial(k: u32, alpha: &[u32]) -> Rational {
    let rest = k - alpha.iter().sum::<u32>();
    let mut num = BigInt::one();
    for i in 2..=k {
        num *= BigInt::from(i);
    }
    let mut den = BigInt::one();
    for &a in alpha.iter().chain(std::iter::once(&rest)) {
        for i in 2..=a {
            den *= BigInt::from(i);
        }
    }
    Rational::new(num, den)
}

fn exponents_up_to(n: usize, k: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(i: usize, remaining: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..=remaining {
            cur[i] = v;
            rec(i + 1, remaining - v, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, k, &mut cur, &mut out);
    out.retain(|e| e.iter().any(|&v| v > 0));
    out.sort_by_key(|e| (e.iter().sum::<u32>(), e.clone()));
    out
}

/// The degree-`k` Veronese-type monomial map whose form is exactly
/// `(1 + sum_i z_i xi_i)^k`; the component for exponent `alpha` carries the
/// coefficient `sqrt(multinomial(k; alpha))`.
pub fn veronese(n: usize, k: u32) -> MapTuple {
    let components = exponents_up_to(n, k)
        .into_iter()
        .map(|alpha| {
            let m = multinomial(k, &alpha);
            MapComponent::monomial(alpha, MapCoeff::new(Rational::one(), Some(m)))
        })
        .collect();
    MapTuple::new(n, components)
}

/// Outcome of the Calabi resolvability test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Resolvability {
    Resolvable {
        /// (monomial, pivot) in elimination order; all pivots positive.
        pivots: Vec<(Vec<u32>, Rational)>,
        /// A map with `form_from_map(witness) - 1` equal to the tested data.
        witness: MapTuple,
    },
    NotResolvable {
        z_monomial: Vec<u32>,
        xi_monomial: Vec<u32>,
        value: Rational,
    },
}

impl Resolvability {
    pub fn is_resolvable(&self) -> bool {
        matches!(self, Resolvability::Resolvable { .. })
    }
}

/// Decide whether `P - 1` is a nonnegative Hermitian combination of
/// monomials of degree at most `d`, by exact pivoted LDL elimination.
pub fn resolvable_check_form(p: &HermitianForm, d: u32) -> Result<Resolvability, HermitianError> {
    resolvable_core(p.n, &p.entries(), d)
}

/// Series variant of [`resolvable_check_form`]; the series is read as the
/// Gram data `z^a xi^b -> coefficient`.
pub fn resolvable_check_series(
    p: &PolarizedSeries,
    d: u32,
) -> Result<Resolvability, HermitianError> {
    let mut entries = BTreeMap::new();
    for (e, c) in p.terms() {
        entries.insert((e.z_exp.clone(), e.xi_exp.clone()), c.clone());
    }
    resolvable_core(p.n(), &entries, d)
}

fn resolvable_core(
    n: usize,
    entries: &BTreeMap<(Vec<u32>, Vec<u32>), Rational>,
    d: u32,
) -> Result<Resolvability, HermitianError> {
    let zero_mono = vec![0u32; n];
    let constant = entries
        .get(&(zero_mono.clone(), zero_mono.clone()))
        .cloned()
        .unwrap_or_else(Rational::zero);
    if !constant.is_one() {
        return Err(HermitianError::NonUnitConstantTerm(format_rational(
            &constant,
        )));
    }
    // Monomial basis: everything of degree <= d appearing in P - 1.
    let mut set: std::collections::BTreeSet<Vec<u32>> = std::collections::BTreeSet::new();
    for ((a, b), c) in entries {
        if c.is_zero() || (a == &zero_mono && b == &zero_mono) {
            continue;
        }
        for m in [a, b] {
            if m.iter().sum::<u32>() <= d {
                set.insert(m.clone());
            }
        }
    }
    let monomials: Vec<Vec<u32>> = set.into_iter().collect();
    let index: BTreeMap<&Vec<u32>, usize> =
        monomials.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let k = monomials.len();
    let mut m = vec![vec![Rational::zero(); k]; k];
    for ((a, b), c) in entries {
        if a == &zero_mono && b == &zero_mono {
            continue;
        }
        if let (Some(&i), Some(&j)) = (index.get(a), index.get(b)) {
            m[i][j] += c;
        }
    }
    for i in 0..k {
        for j in (i + 1)..k {
            if m[i][j] != m[j][i] {
                return Err(HermitianError::AsymmetricInput(
                    monomial_name(&monomials[i], "z"),
                    monomial_name(&monomials[j], "xi"),
                ));
            }
        }
    }

    let mut active = vec![true; k];
    let mut pivots: Vec<(usize, Rational)> = Vec::new();
    let mut columns: Vec<Vec<Rational>> = Vec::new();
    loop {
        // Largest-magnitude diagonal first; ties fall to the lexicographically
        // smaller monomial, which comes first in the sorted basis.
        let mut best: Option<usize> = None;
        for i in 0..k {
            if !active[i] || m[i][i].is_zero() {
                continue;
            }
            best = match best {
                None => Some(i),
                Some(b) => {
                    if m[i][i].abs() > m[b][b].abs() {
                        Some(i)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        let p = match best {
            Some(p) => p,
            None => {
                // All remaining diagonals vanish; a surviving off-diagonal
                // entry certifies indefiniteness.
                for i in 0..k {
                    if !active[i] {
                        continue;
                    }
                    for j in 0..k {
                        if i != j && active[j] && !m[i][j].is_zero() {
                            return Ok(Resolvability::NotResolvable {
                                z_monomial: monomials[i].clone(),
                                xi_monomial: monomials[j].clone(),
                                value: m[i][j].clone(),
                            });
                        }
                    }
                }
                break;
            }
        };
        let dpiv = m[p][p].clone();
        if dpiv.is_negative() {
            return Ok(Resolvability::NotResolvable {
                z_monomial: monomials[p].clone(),
                xi_monomial: monomials[p].clone(),
                value: dpiv,
            });
        }
        let col: Vec<Rational> = (0..k)
            .map(|j| {
                if active[j] {
                    &m[j][p] / &dpiv
                } else {
                    Rational::zero()
                }
            })
            .collect();
        for i in 0..k {
            if !active[i] || i == p {
                continue;
            }
            for j in 0..k {
                if !active[j] || j == p {
                    continue;
                }
                let delta = &m[i][p] * &m[p][j] / &dpiv;
                m[i][j] -= delta;
            }
        }
        active[p] = false;
        pivots.push((p, dpiv));
        columns.push(col);
    }

    let components = pivots
        .iter()
        .zip(&columns)
        .map(|((_, dpiv), col)| {
            let mut terms = BTreeMap::new();
            for (j, c) in col.iter().enumerate() {
                if !c.is_zero() {
                    terms.insert(
                        monomials[j].clone(),
                        MapCoeff::new(c.clone(), Some(dpiv.clone())),
                    );
                }
            }
            MapComponent { terms }
        })
        .collect();
    Ok(Resolvability::Resolvable {
        pivots: pivots
            .into_iter()
            .map(|(i, dv)| (monomials[i].clone(), dv))
            .collect(),
        witness: MapTuple::new(n, components),
    })
}

/// Result of factoring a potential as `A * h^m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorResult {
    pub a: Rational,
    pub m: u32,
}

/// Cheap reducibility witnesses for a polarized potential: a rank-one Gram
/// matrix means `h = f(z) g(xi)`, and a common variable factor means some
/// `z_i` divides `h`. Passing the screen does not prove irreducibility.
#[allow(clippy::needless_range_loop)] // rows of `m` are updated against each other
pub fn irreducibility_screen(h: &HermitianForm) -> Option<String> {
    let k = h.monomials().len();
    if k > 1 {
        let mut m: Vec<Vec<Rational>> = h.gram().to_vec();
        let mut rank = 0usize;
        for col in 0..k {
            let Some(pivot_row) = (rank..k).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, pivot_row);
            let pivot = m[rank][col].clone();
            for r in 0..k {
                if r != rank && !m[r][col].is_zero() {
                    let factor = &m[r][col] / &pivot;
                    for c in 0..k {
                        let delta = &factor * &m[rank][c];
                        m[r][c] -= delta;
                    }
                }
            }
            rank += 1;
            if rank > 1 {
                break;
            }
        }
        if rank <= 1 {
            return Some("Gram matrix has rank one, so h splits as f(z)*g(xi)".to_string());
        }
    }
    for i in 0..h.n() {
        let divides_all = h.entries().keys().all(|(a, _)| a[i] > 0);
        if divides_all {
            return Some(format!("z{} divides every term of h", i + 1));
        }
    }
    None
}

/// Evaluate `h(z, conj z)` at Gaussian-rational sample points and report
/// the first non-positive value, if any. A clean sample is evidence, not a
/// proof, of global positivity.
pub fn sample_positivity(h: &HermitianForm, samples_per_axis: i64) -> Option<(String, Rational)> {
    let mut grid: Vec<(Rational, Rational)> = Vec::new();
    for a in -samples_per_axis..=samples_per_axis {
        for b in -samples_per_axis..=samples_per_axis {
            grid.push((
                Rational::new(a.into(), 2.into()),
                Rational::new(b.into(), 2.into()),
            ));
        }
    }
    // sample along the diagonal z_1 = ... = z_n to keep the grid small
    for point in &grid {
        let (re, im) = point;
        let mut value = Rational::zero();
        for ((alpha, beta), c) in h.entries() {
            // z^alpha * conj(z)^beta with every coordinate equal
            let (mut vr, mut vi) = (Rational::one(), Rational::zero());
            let total_a: u32 = alpha.iter().sum();
            let total_b: u32 = beta.iter().sum();
            for _ in 0..total_a {
                let nr = &vr * re - &vi * im;
                let ni = &vr * im + &vi * re;
                vr = nr;
                vi = ni;
            }
            for _ in 0..total_b {
                let nr = &vr * re + &vi * im;
                let ni = &vi * re - &vr * im;
                vr = nr;
                vi = ni;
            }
            value += c * vr;
        }
        if !value.is_positive() {
            return Some((
                format!(
                    "z = ({} + {}*i, ...)",
                    format_rational(re),
                    format_rational(im)
                ),
                value,
            ));
        }
    }
    None
}

/// Sparse polynomial in the 2n joint variables, for exact division.
#[derive(Debug, Clone, PartialEq, Eq)]
struct JointPoly {
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl JointPoly {
    fn from_form(p: &HermitianForm) -> Self {
        let mut terms = BTreeMap::new();
        for ((a, b), c) in p.entries() {
            let mut key = a;
            key.extend(b);
            terms.insert(key, c);
        }
        JointPoly { terms }
    }

    fn leading(&self) -> Option<(&Vec<u32>, &Rational)> {
        // Graded-lex leading term.
        self.terms
            .iter()
            .max_by_key(|(k, _)| (k.iter().sum::<u32>(), (*k).clone()))
    }

    fn max_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|k| k.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    fn is_constant(&self) -> bool {
        self.max_degree() == 0
    }

    fn constant_value(&self) -> Rational {
        self.terms
            .iter()
            .find(|(k, _)| k.iter().all(|&e| e == 0))
            .map(|(_, v)| v.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// Exact division; `None` when a remainder survives.
    fn div_exact(&self, divisor: &JointPoly) -> Option<JointPoly> {
        let (lt_exp, lt_coeff) = divisor.leading()?;
        let lt_exp = lt_exp.clone();
        let lt_coeff = lt_coeff.clone();
        let mut rem = self.clone();
        let mut quotient: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        while let Some((r_exp, r_coeff)) = rem.leading() {
            let r_exp = r_exp.clone();
            let r_coeff = r_coeff.clone();
            if r_exp.len() != lt_exp.len() || r_exp.iter().zip(&lt_exp).any(|(a, b)| a < b) {
                return None;
            }
            let q_exp: Vec<u32> = r_exp.iter().zip(&lt_exp).map(|(a, b)| a - b).collect();
            let q_coeff = &r_coeff / &lt_coeff;
            quotient.insert(q_exp.clone(), q_coeff.clone());
            for (e, c) in &divisor.terms {
                let sum: Vec<u32> = q_exp.iter().zip(e).map(|(a, b)| a + b).collect();
                let entry = rem.terms.entry(sum).or_insert_with(Rational::zero);
                *entry -= &q_coeff * c;
            }
            rem.terms.retain(|_, v| !v.is_zero());
        }
        Some(JointPoly { terms: quotient })
    }

    fn to_form(&self, n: usize) -> Result<HermitianForm, HermitianError> {
        let mut entries = BTreeMap::new();
        for (k, v) in &self.terms {
            entries.insert((k[..n].to_vec(), k[n..].to_vec()), v.clone());
        }
        HermitianForm::from_entries(n, &entries)
    }
}

/// Find the unique `(A, m)` with `P = A * h^m` by iterated exact division.
pub fn factor_by_h(p: &HermitianForm, h: &HermitianForm) -> Result<FactorResult, HermitianError> {
    if p.n() != h.n() {
        return Err(HermitianError::DimensionMismatch);
    }
    if h.is_constant() {
        return Err(HermitianError::ConstantDivisor);
    }
    if !h.constant_term().is_positive() {
        return Err(HermitianError::NonPositiveConstantTerm(format_rational(
            &h.constant_term(),
        )));
    }
    if !p.constant_term().is_positive() {
        return Err(HermitianError::NonPositiveConstantTerm(format_rational(
            &p.constant_term(),
        )));
    }
    let divisor = JointPoly::from_form(h);
    let mut quotient = JointPoly::from_form(p);
    let mut m = 0u32;
    while !quotient.is_constant() {
        quotient = quotient.div_exact(&divisor).ok_or_else(|| {
            HermitianError::NotAPurePower(format!(
                "division by h leaves a remainder after {m} exact steps"
            ))
        })?;
        m += 1;
    }
    if m == 0 {
        return Err(HermitianError::NotAPurePower(
            "potential is constant while h is not".into(),
        ));
    }
    let a = quotient.constant_value();
    if !a.is_positive() {
        return Err(HermitianError::NotAPurePower(format!(
            "recovered constant {} is not positive",
            format_rational(&a)
        )));
    }
    Ok(FactorResult { a, m })
}

/// Quotient form `P / h`, exact or `None`; used by callers that need the
/// cofactor rather than the full power structure.
pub fn form_div_exact(p: &HermitianForm, h: &HermitianForm) -> Option<HermitianForm> {
    if p.n() != h.n() {
        return None;
    }
    JointPoly::from_form(p)
        .div_exact(&JointPoly::from_form(h))
        .and_then(|q| q.to_form(p.n()).ok())
}

/// Weighted-form construction of a verifiable identity instance whose
/// log-residual vanishes identically: the factors are
/// `h_l = (1+|z|^2)^{m_l} (1+|f|^2)^{m'_l}` and
/// `q_j = (1+|z|^2)^{n_j} (1+|f|^2)^{n'_j}` with
/// `sum m'_l mu_l = sum n'_j lambda_j` and
/// `sum m_l mu_l = sum n_j lambda_j + 1`.
#[allow(clippy::too_many_arguments)]
pub fn example62_construct(
    mu: &[QModReal],
    lambda: &[QModReal],
    m: &[u32],
    n_mult: &[u32],
    m_prime: &[u32],
    n_prime: &[u32],
    f: &MapTuple,
) -> Result<crate::identity::IdentityInstance, HermitianError> {
    if mu.is_empty() || mu.len() != m.len() || mu.len() != m_prime.len() {
        return Err(HermitianError::PreconditionViolated(
            "mu, m, m' must be nonempty lists of one common length".into(),
        ));
    }
    if lambda.len() != n_mult.len() || lambda.len() != n_prime.len() {
        return Err(HermitianError::PreconditionViolated(
            "lambda, n, n' must share one length".into(),
        ));
    }
    if m.contains(&0) || n_mult.contains(&0) {
        return Err(HermitianError::PreconditionViolated(
            "metric multiples m, n must be positive".into(),
        ));
    }
    if !f.vanishes_at_origin() {
        return Err(HermitianError::PreconditionViolated(
            "f must vanish at the origin".into(),
        ));
    }
    let basis = mu[0].basis().clone();

    let int = |v: u32| Rational::from_integer(BigInt::from(v));
    let mut coeffs: Vec<Rational> = m_prime.iter().map(|&v| int(v)).collect();
    coeffs.extend(n_prime.iter().map(|&v| -int(v)));
    let mut elems = mu.to_vec();
    elems.extend_from_slice(lambda);
    let lhs = crate::scalar::qmod_combine(&coeffs, &elems)?;
    if !lhs.is_zero() {
        return Err(HermitianError::PreconditionViolated(format!(
            "sum m'_l mu_l - sum n'_j lambda_j = {lhs}, expected 0"
        )));
    }
    let mut coeffs: Vec<Rational> = m.iter().map(|&v| int(v)).collect();
    coeffs.extend(n_mult.iter().map(|&v| -int(v)));
    let factor_eq = crate::scalar::qmod_combine(&coeffs, &elems)?;
    let one = QModReal::from_rational(&basis, Rational::one());
    let gap = factor_eq.sub(&one)?;
    if !gap.is_zero() {
        return Err(HermitianError::PreconditionViolated(format!(
            "sum m_l mu_l - sum n_j lambda_j = {factor_eq}, expected 1"
        )));
    }

    let base = form_from_map(&MapTuple::identity(f.n))?;
    let f_form = form_from_map(f)?;
    let mut f_factors = Vec::new();
    for ((w, &mi), &mpi) in mu.iter().zip(m).zip(m_prime) {
        let form = form_product(&form_pow(&base, mi)?, &form_pow(&f_form, mpi)?)?;
        f_factors.push(crate::identity::WeightedForm {
            weight: w.clone(),
            form,
        });
    }
    let mut g_factors = Vec::new();
    for ((w, &nj), &npj) in lambda.iter().zip(n_mult).zip(n_prime) {
        let form = form_product(&form_pow(&base, nj)?, &form_pow(&f_form, npj)?)?;
        g_factors.push(crate::identity::WeightedForm {
            weight: w.clone(),
            form,
        });
    }
    Ok(crate::identity::IdentityInstance {
        h: base,
        r: one,
        f_factors,
        g_factors,
    })
}
