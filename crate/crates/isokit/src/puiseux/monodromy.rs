//! Numeric analytic continuation of all branches along loops, rounded to a
//! branch permutation only behind explicit separation margins.
//!
//! This is the one deliberately numeric component: the polynomial is exact,
//! paths adapt their step size, and the endpoint matching is accepted only
//! when every root pair is separated by at least ten times the final
//! Newton residual.

use num_complex::Complex64;
use num_traits::ToPrimitive;

use super::locus::branch_locus;
use super::{AlgebraicFunction, PuiseuxError};
use crate::scalar::Rational;

/// Loop description: a circle, or keyhole loops around chosen locus points
/// composed in the given order from a common basepoint.
#[derive(Debug, Clone, PartialEq)]
pub enum LoopShape {
    Circle {
        center: (Rational, Rational),
        radius: Rational,
    },
    Loci {
        basepoint: (Rational, Rational),
        indices: Vec<usize>,
    },
}

#[derive(Debug, Clone)]
pub struct MonodromyDiagnostics {
    pub steps: usize,
    pub final_residual: f64,
    pub min_separation: f64,
}

/// A computed branch permutation: branch `k` continues into branch
/// `permutation[k]`.
#[derive(Debug, Clone)]
pub struct MonodromyAction {
    pub shape: LoopShape,
    pub permutation: Vec<usize>,
    pub diagnostics: MonodromyDiagnostics,
}

impl MonodromyAction {
    pub fn is_identity(&self) -> bool {
        self.permutation.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Cycle lengths of the permutation, descending.
    pub fn cycle_structure(&self) -> Vec<usize> {
        let n = self.permutation.len();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                k = self.permutation[k];
                len += 1;
            }
            cycles.push(len);
        }
        cycles.sort_unstable_by(|a, b| b.cmp(a));
        cycles
    }
}

/// Compose `after . before` as branch permutations.
pub fn compose(before: &[usize], after: &[usize]) -> Vec<usize> {
    before.iter().map(|&k| after[k]).collect()
}

/// Monodromy along a circle traversed counterclockwise once.
pub fn monodromy_circle(
    f: &AlgebraicFunction,
    center: (Rational, Rational),
    radius: Rational,
) -> Result<MonodromyAction, PuiseuxError> {
    let c = Complex64::new(to_f64(&center.0), to_f64(&center.1));
    let r = to_f64(&radius);
    let path = circle_path(c, r, 0.0, 1.0, 96);
    let perm = continue_along(f, &path)?;
    Ok(MonodromyAction {
        shape: LoopShape::Circle { center, radius },
        permutation: perm.0,
        diagnostics: perm.1,
    })
}

/// Monodromy along keyhole loops around the selected locus points,
/// composed in the given order, starting and ending at `basepoint`.
pub fn monodromy_loci(
    f: &AlgebraicFunction,
    basepoint: (Rational, Rational),
    indices: &[usize],
) -> Result<MonodromyAction, PuiseuxError> {
    let locus = branch_locus(f)?;
    let centers: Vec<Complex64> = locus.points.iter().map(|p| p.approx()).collect();
    for &i in indices {
        if i >= centers.len() {
            return Err(PuiseuxError::IsolationFailed(format!(
                "locus index {i} out of range ({} points)",
                centers.len()
            )));
        }
    }
    let b = Complex64::new(to_f64(&basepoint.0), to_f64(&basepoint.1));
    let mut path = vec![b];
    for &i in indices {
        let c = centers[i];
        let mut nearest = f64::INFINITY;
        for (j, other) in centers.iter().enumerate() {
            if j != i {
                nearest = nearest.min((c - other).norm());
            }
        }
        nearest = nearest.min((c - b).norm());
        if !nearest.is_finite() || nearest == 0.0 {
            return Err(PuiseuxError::PathTooCloseToLocus);
        }
        let r = 0.35 * nearest;
        let dir = (b - c) / (b - c).norm();
        let entry = c + dir * r;
        // approach segment must keep clear of the other locus points
        for (j, other) in centers.iter().enumerate() {
            if indices.contains(&j) && j != i {
                continue;
            }
            if j == i {
                continue;
            }
            if segment_distance(b, entry, *other) < 0.5 * r {
                return Err(PuiseuxError::PathTooCloseToLocus);
            }
        }
        let start_angle = (entry - c).arg() / (2.0 * std::f64::consts::PI);
        path.push(entry);
        path.extend(circle_path(c, r, start_angle, 1.0, 96).into_iter().skip(1));
        path.push(b);
    }
    let perm = continue_along(f, &path)?;
    Ok(MonodromyAction {
        shape: LoopShape::Loci {
            basepoint,
            indices: indices.to_vec(),
        },
        permutation: perm.0,
        diagnostics: perm.1,
    })
}

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn circle_path(
    center: Complex64,
    radius: f64,
    start_turn: f64,
    turns: f64,
    segments: usize,
) -> Vec<Complex64> {
    (0..=segments)
        .map(|k| {
            let t = start_turn + turns * k as f64 / segments as f64;
            center + radius * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t)
        })
        .collect()
}

fn segment_distance(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

struct PolyEval {
    /// Y-coefficients, each a z-polynomial given by f64 coefficients.
    coeffs: Vec<Vec<f64>>,
}

impl PolyEval {
    fn new(f: &AlgebraicFunction) -> Self {
        PolyEval {
            coeffs: f
                .coeffs()
                .iter()
                .map(|c| {
                    c.coeffs()
                        .iter()
                        .map(|x| x.to_f64().unwrap_or(f64::NAN))
                        .collect()
                })
                .collect(),
        }
    }

    fn at(&self, z: Complex64) -> Vec<Complex64> {
        self.coeffs
            .iter()
            .map(|c| {
                let mut acc = Complex64::new(0.0, 0.0);
                for x in c.iter().rev() {
                    acc = acc * z + x;
                }
                acc
            })
            .collect()
    }
}

fn eval_uni(coeffs: &[Complex64], y: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = acc * y + c;
    }
    acc
}

fn eval_uni_deriv(coeffs: &[Complex64], y: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, c) in coeffs.iter().enumerate().skip(1).rev() {
        acc = acc * y + *c * k as f64;
    }
    acc
}

fn newton_refine(coeffs: &[Complex64], start: Complex64) -> Option<(Complex64, f64)> {
    let mut y = start;
    let mut last = f64::INFINITY;
    for _ in 0..40 {
        let d = eval_uni_deriv(coeffs, y);
        if d.norm() == 0.0 {
            return None;
        }
        let step = eval_uni(coeffs, y) / d;
        y -= step;
        last = step.norm();
        if last < 1e-13 * (1.0 + y.norm()) {
            return Some((y, last));
        }
    }
    (last < 1e-9 * (1.0 + y.norm())).then_some((y, last))
}

fn min_pairwise(roots: &[Complex64]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            m = m.min((roots[i] - roots[j]).norm());
        }
    }
    m
}

fn continue_along(
    f: &AlgebraicFunction,
    path: &[Complex64],
) -> Result<(Vec<usize>, MonodromyDiagnostics), PuiseuxError> {
    let d = f.degree();
    let pe = PolyEval::new(f);
    let start_coeffs = pe.at(path[0]);
    if start_coeffs.last().map(|c| c.norm()).unwrap_or(0.0) < 1e-12 {
        return Err(PuiseuxError::PathTooCloseToLocus);
    }
    let initial = all_roots_f64(&start_coeffs);
    if initial.len() != d {
        return Err(PuiseuxError::PathTooCloseToLocus);
    }
    let base_sep = min_pairwise(&initial);
    if !base_sep.is_finite() || base_sep < 1e-9 {
        return Err(PuiseuxError::AmbiguousMatching);
    }
    let mut roots = initial.clone();
    let mut steps = 0usize;
    let mut residual: f64 = 0.0;
    for w in path.windows(2) {
        advance(&pe, &mut roots, w[0], w[1], 0, &mut steps, &mut residual)?;
    }
    // match the continued roots back to the initial labels
    let final_sep = min_pairwise(&initial);
    if final_sep < 10.0 * residual.max(1e-15) {
        return Err(PuiseuxError::AmbiguousMatching);
    }
    let mut perm = vec![usize::MAX; d];
    for (k, v) in roots.iter().enumerate() {
        let mut best = usize::MAX;
        let mut best_dist = f64::INFINITY;
        for (j, r) in initial.iter().enumerate() {
            let dist = (v - r).norm();
            if dist < best_dist {
                best_dist = dist;
                best = j;
            }
        }
        if best_dist > 0.4 * final_sep {
            return Err(PuiseuxError::AmbiguousMatching);
        }
        perm[k] = best;
    }
    let mut seen = vec![false; d];
    for &p in &perm {
        if p == usize::MAX || seen[p] {
            return Err(PuiseuxError::AmbiguousMatching);
        }
        seen[p] = true;
    }
    Ok((
        perm,
        MonodromyDiagnostics {
            steps,
            final_residual: residual,
            min_separation: final_sep,
        },
    ))
}

fn advance(
    pe: &PolyEval,
    roots: &mut Vec<Complex64>,
    from: Complex64,
    to: Complex64,
    depth: usize,
    steps: &mut usize,
    residual: &mut f64,
) -> Result<(), PuiseuxError> {
    if depth > 28 {
        return Err(PuiseuxError::PathTooCloseToLocus);
    }
    let coeffs = pe.at(to);
    if coeffs.last().map(|c| c.norm()).unwrap_or(0.0) < 1e-13 {
        return Err(PuiseuxError::PathTooCloseToLocus);
    }
    let sep = min_pairwise(roots).max(1e-12);
    let mut next = Vec::with_capacity(roots.len());
    let mut ok = true;
    let mut worst = 0.0f64;
    for &r in roots.iter() {
        match newton_refine(&coeffs, r) {
            Some((v, res)) => {
                if (v - r).norm() > 0.3 * sep {
                    ok = false;
                    break;
                }
                worst = worst.max(res);
                next.push(v);
            }
            None => {
                ok = false;
                break;
            }
        }
    }
    if ok && next.len() == roots.len() && min_pairwise(&next) > 0.2 * sep {
        *roots = next;
        *steps += 1;
        *residual = residual.max(worst);
        return Ok(());
    }
    let mid = (from + to) * 0.5;
    advance(pe, roots, from, mid, depth + 1, steps, residual)?;
    advance(pe, roots, mid, to, depth + 1, steps, residual)
}

fn all_roots_f64(coeffs: &[Complex64]) -> Vec<Complex64> {
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let radius = 1.0 + monic[..d].iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..d)
        .map(|k| radius * 0.7 * seed.powu(k as u32 + 1) / seed.norm().powi(k as i32))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                roots[i] += Complex64::new(1e-7, 1e-7);
                continue;
            }
            let delta = eval_uni(&monic, roots[i]) / denom;
            roots[i] -= delta;
            moved = moved.max(delta.norm());
        }
        if moved < 1e-14 {
            break;
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::super::qpoly::QPoly;
    use super::*;
    use crate::scalar::{rat, rat_int};

    fn af(coeffs: &[&[i64]]) -> AlgebraicFunction {
        AlgebraicFunction::new(coeffs.iter().map(|c| QPoly::from_i64(c)).collect()).unwrap()
    }

    #[test]
    fn sqrt_transposition() {
        let f = af(&[&[0, -1], &[], &[1]]); // Y^2 - z
        let act = monodromy_circle(&f, (rat_int(0), rat_int(0)), rat_int(1)).unwrap();
        assert_eq!(act.cycle_structure(), vec![2]);
    }

    #[test]
    fn cube_root_three_cycle() {
        let f = af(&[&[0, -1], &[], &[], &[1]]); // Y^3 - z
        let act = monodromy_circle(&f, (rat_int(0), rat_int(0)), rat_int(1)).unwrap();
        assert_eq!(act.cycle_structure(), vec![3]);
    }

    #[test]
    fn loop_around_both_points_is_trivial() {
        let f = af(&[&[0, 1, -1], &[], &[1]]); // Y^2 - z(z-1)
        let act = monodromy_circle(&f, (rat(1, 2), rat_int(0)), rat_int(2)).unwrap();
        assert!(act.is_identity());
    }

    #[test]
    fn single_point_loops_swap() {
        let f = af(&[&[0, 1, -1], &[], &[1]]);
        let a0 = monodromy_loci(&f, (rat(1, 2), rat(1, 2)), &[0]).unwrap();
        let a1 = monodromy_loci(&f, (rat(1, 2), rat(1, 2)), &[1]).unwrap();
        assert_eq!(a0.cycle_structure(), vec![2]);
        assert_eq!(a1.cycle_structure(), vec![2]);
        // composed: trivial
        let both = monodromy_loci(&f, (rat(1, 2), rat(1, 2)), &[0, 1]).unwrap();
        assert!(both.is_identity());
        assert_eq!(compose(&a0.permutation, &a1.permutation), both.permutation);
    }
}
