//! Acceptance suite: one test per criterion, each printing a PASS line.
//! Expected values come from independent oracles computed here (binomial
//! series, exhaustive enumeration, integer brute force), never from the
//! code paths under test.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use isokit::conformal::{
    cone_condition, cone_condition_fm, min_ratio_index, solve_factor_equation, ConeDecision,
    ConformalData, FactorSolution,
};
use isokit::hermitian::{
    example62_construct, factor_by_h, form_from_map, form_pow, resolvable_check_form,
    resolvable_check_series, veronese, FactorResult, HermitianError, HermitianForm, MapTuple,
    Resolvability,
};
use isokit::puiseux::monodromy::compose;
use isokit::puiseux::qpoly::QPoly;
use isokit::puiseux::{
    branch_locus, classify_branching, monodromy_circle, monodromy_loci, newton_puiseux,
    AlgebraicFunction, Branching, Center,
};
use isokit::scalar::{qmod_combine, qmod_sign, rat, rat_int, QBasis, QModReal, Rational, Sign};
use isokit::series::{
    mixed_part, series_log1p, weighted_log_residual, Exponents, PolarizedSeries, SeriesWithWeights,
};

fn pass(n: usize, name: &str) {
    println!("acceptance criterion {n} ({name}): PASS");
}

fn binomial_u64(n: u64, k: u64) -> u64 {
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

#[test]
fn criterion_1_veronese_isometry() {
    let start = Instant::now();
    for n in 1..=3usize {
        let base = form_from_map(&MapTuple::identity(n)).unwrap();
        for k in 1..=4u32 {
            let map = veronese(n, k);
            let expect_count = binomial_u64((n as u64) + u64::from(k), u64::from(k)) - 1;
            assert_eq!(
                map.target_dim() as u64,
                expect_count,
                "count at n={n} k={k}"
            );
            if k == 2 {
                assert_eq!(map.target_dim(), n * (n + 3) / 2);
            }
            let form = form_from_map(&map).unwrap();
            let expect = form_pow(&base, k).unwrap();
            assert_eq!(form, expect, "exact form equality at n={n} k={k}");
            // zero residual of the identity form = (1 + <z, xi>)^k
            let order = 2 * k + 2;
            let diff = form.to_series(order).sub(&expect.to_series(order)).unwrap();
            assert!(diff.is_zero());
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "runtime {elapsed:?} exceeds 1s"
    );
    pass(1, "veronese isometry");
}

fn example62_basis() -> (Arc<QBasis>, Vec<QModReal>, Vec<QModReal>, QModReal) {
    let b = QBasis::with_sqrt(rat_int(2)).unwrap();
    let mu = vec![
        QModReal::new(b.clone(), vec![rat(1, 4), rat_int(1)]).unwrap(),
        QModReal::new(b.clone(), vec![rat(1, 4), rat_int(0)]).unwrap(),
    ];
    let lambda = vec![QModReal::new(b.clone(), vec![rat_int(0), rat_int(1)]).unwrap()];
    let r = QModReal::from_rational(&b, rat_int(1));
    (b, mu, lambda, r)
}

#[test]
fn criterion_2_example_62_end_to_end() {
    let start = Instant::now();
    let (_b, mu, lambda, r) = example62_basis();
    let data = ConformalData::new(mu.clone(), lambda.clone(), r).unwrap();

    assert!(cone_condition(&data).unwrap().holds());

    let sols = solve_factor_equation(&data, 5).unwrap();
    let expect = vec![
        FactorSolution {
            m: vec![1, 3],
            n: vec![1],
        },
        FactorSolution {
            m: vec![2, 2],
            n: vec![2],
        },
        FactorSolution {
            m: vec![3, 1],
            n: vec![3],
        },
    ];
    assert_eq!(sols, expect);

    // independent oracle: exhaustive enumeration over [1,5]^3
    let mut brute = Vec::new();
    for m1 in 1u32..=5 {
        for m2 in 1u32..=5 {
            for n1 in 1u32..=5 {
                let coeffs = vec![
                    Rational::from_integer(m1.into()),
                    Rational::from_integer(m2.into()),
                    -Rational::from_integer(n1.into()),
                ];
                let elems = vec![mu[0].clone(), mu[1].clone(), lambda[0].clone()];
                let value = qmod_combine(&coeffs, &elems).unwrap();
                let one = QModReal::from_rational(value.basis(), rat_int(1));
                if value.sub(&one).unwrap().is_zero() {
                    brute.push(FactorSolution {
                        m: vec![m1, m2],
                        n: vec![n1],
                    });
                }
            }
        }
    }
    brute.sort();
    assert_eq!(sols, brute);

    let inst = example62_construct(
        &mu,
        &lambda,
        &[2, 2],
        &[2],
        &[0, 0],
        &[0],
        &MapTuple::empty(1),
    )
    .unwrap();
    let report = inst.verify(10).unwrap();
    assert!(report.all_zero, "residual must vanish at order 10");
    for f in report
        .f_factorizations
        .iter()
        .chain(&report.g_factorizations)
    {
        let f = f.as_ref().expect("every factor is a pure power of h");
        assert_eq!(f.a, rat_int(1));
        assert_eq!(f.m, 2);
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "runtime {elapsed:?} exceeds 5s"
    );
    pass(2, "worked example end to end");
}

/// Independent oracle: generalized binomial coefficient C(alpha, k).
fn general_binomial(alpha: &Rational, k: u32) -> Rational {
    let mut acc = Rational::one();
    for i in 0..k {
        acc *= alpha - Rational::from_integer(i.into());
        acc /= Rational::from_integer((i + 1).into());
    }
    acc
}

/// Oracle series for (1 + z1 xi1)^alpha truncated at `order`.
fn binomial_power_series(alpha: &Rational, order: u32) -> PolarizedSeries {
    let mut s = PolarizedSeries::zero(1, order);
    for k in 0..=(order / 2) {
        s.add_term(
            Exponents {
                z_exp: vec![k],
                xi_exp: vec![k],
            },
            general_binomial(alpha, k),
        );
    }
    s
}

#[test]
fn criterion_3_calabi_obstruction() {
    // frozen oracle values
    assert_eq!(general_binomial(&rat(1, 2), 2), rat(-1, 8));
    assert_eq!(general_binomial(&rat(5, 2), 4), rat(-5, 128));

    let half = binomial_power_series(&rat(1, 2), 4);
    match resolvable_check_series(&half, 4).unwrap() {
        Resolvability::NotResolvable {
            z_monomial,
            xi_monomial,
            value,
        } => {
            assert_eq!(z_monomial, vec![2]);
            assert_eq!(xi_monomial, vec![2]);
            assert_eq!(value, rat(-1, 8));
        }
        other => panic!("expected rejection, got {other:?}"),
    }

    let five_half = binomial_power_series(&rat(5, 2), 8);
    match resolvable_check_series(&five_half, 8).unwrap() {
        Resolvability::NotResolvable {
            z_monomial,
            xi_monomial,
            value,
        } => {
            assert_eq!(z_monomial, vec![4]);
            assert_eq!(xi_monomial, vec![4]);
            assert_eq!(value, rat(-5, 128));
        }
        other => panic!("expected rejection, got {other:?}"),
    }

    let base = form_from_map(&MapTuple::identity(1)).unwrap();
    for k in 1..=6u32 {
        let form = form_pow(&base, k).unwrap();
        match resolvable_check_form(&form, 2 * k).unwrap() {
            Resolvability::Resolvable { pivots, witness } => {
                assert_eq!(pivots.len(), k as usize);
                assert!(pivots.iter().all(|(_, p)| p.is_positive()));
                assert_eq!(form_from_map(&witness).unwrap(), form);
            }
            other => panic!("expected resolvable at k={k}, got {other:?}"),
        }
    }
    pass(3, "resolvability obstruction");
}

/// Brute-force cone witness search over twelfths, in exact i64 arithmetic.
/// Witness entries range over p/q with p <= 8, q <= 4.
fn brute_force_cone_violated(mu: &[QModReal], lambda: &[QModReal]) -> bool {
    // admissible values as multiples of 1/12
    let mut values: Vec<i64> = Vec::new();
    for q in 1..=4i64 {
        for p in 0..=8i64 {
            let v = 12 * p / q;
            if 12 * p % q == 0 && !values.contains(&v) {
                values.push(v);
            }
        }
    }
    values.sort_unstable();
    // coordinates times 12 are integers (instance denominators <= 4)
    let int_coords = |x: &QModReal| -> (i64, i64) {
        let c = x.coords();
        let scale = rat_int(12);
        let a = &c[0] * &scale;
        let b = &c[1] * &scale;
        assert!(a.is_integer() && b.is_integer(), "denominator above 4");
        (
            i64::try_from(a.to_integer()).unwrap(),
            i64::try_from(b.to_integer()).unwrap(),
        )
    };
    let lam: Vec<(i64, i64)> = lambda.iter().map(int_coords).collect();
    let muv: Vec<(i64, i64)> = mu.iter().map(int_coords).collect();

    // enumerate c over values^v, d over values^(m-1), solve the last d
    let v = lam.len();
    let m = muv.len();
    let mut c_idx = vec![0usize; v];
    loop {
        let mut cv = (0i64, 0i64);
        let mut all_zero = true;
        for (k, &ci) in c_idx.iter().enumerate() {
            let val = values[ci];
            if val != 0 {
                all_zero = false;
            }
            cv.0 += val * lam[k].0;
            cv.1 += val * lam[k].1;
        }
        if !all_zero && d_side_solvable(&muv, &values, cv, m) {
            return true;
        }
        // odometer
        let mut k = 0;
        loop {
            if k == v {
                return false;
            }
            c_idx[k] += 1;
            if c_idx[k] < values.len() {
                break;
            }
            c_idx[k] = 0;
            k += 1;
        }
    }
}

fn d_side_solvable(muv: &[(i64, i64)], values: &[i64], target: (i64, i64), m: usize) -> bool {
    let mut d_idx = vec![0usize; m - 1];
    loop {
        let mut rem = target;
        for (k, &di) in d_idx.iter().enumerate() {
            rem.0 -= values[di] * muv[k].0;
            rem.1 -= values[di] * muv[k].1;
        }
        // solve the last entry exactly
        let last = muv[m - 1];
        let candidate = if last.0 != 0 {
            (rem.0 % last.0 == 0).then(|| rem.0 / last.0)
        } else {
            (last.1 != 0 && rem.1 % last.1 == 0).then(|| rem.1 / last.1)
        };
        if let Some(dl) = candidate {
            if dl >= 0
                && dl * last.0 == rem.0
                && dl * last.1 == rem.1
                && values.binary_search(&dl).is_ok()
            {
                return true;
            }
        }
        if m == 1 {
            return false;
        }
        let mut k = 0;
        loop {
            if k == m - 1 {
                return false;
            }
            d_idx[k] += 1;
            if d_idx[k] < values.len() {
                break;
            }
            d_idx[k] = 0;
            k += 1;
        }
    }
}

fn random_positive_factor(rng: &mut StdRng, b: &Arc<QBasis>) -> QModReal {
    loop {
        let num0 = rng.gen_range(0..=8);
        let den0 = rng.gen_range(1..=4);
        let num1 = rng.gen_range(-8..=8i64);
        let den1 = rng.gen_range(1..=4);
        let x = QModReal::new(b.clone(), vec![rat(num0, den0), rat(num1, den1)]).unwrap();
        if qmod_sign(&x) == Ok(Sign::Positive) {
            return x;
        }
    }
}

#[test]
fn criterion_4_cone_decision_oracle_equivalence() {
    let start = Instant::now();
    let b = QBasis::with_sqrt(rat_int(2)).unwrap();
    let mut rng = StdRng::seed_from_u64(20260810);
    let mut violated = 0usize;
    let mut brute_hits = 0usize;
    for _ in 0..100 {
        let m = rng.gen_range(1..=3usize);
        let v = rng.gen_range(1..=3usize);
        let mu: Vec<QModReal> = (0..m)
            .map(|_| random_positive_factor(&mut rng, &b))
            .collect();
        let lambda: Vec<QModReal> = (0..v)
            .map(|_| random_positive_factor(&mut rng, &b))
            .collect();
        let r = QModReal::from_rational(&b, rat_int(1));
        let data = ConformalData::new(mu.clone(), lambda.clone(), r).unwrap();
        let decision = cone_condition(&data).unwrap();
        // the elimination route must agree both ways
        assert_eq!(
            decision.holds(),
            cone_condition_fm(&data).unwrap().holds(),
            "simplex and elimination disagree"
        );
        if brute_force_cone_violated(&mu, &lambda) {
            brute_hits += 1;
            assert!(
                !decision.holds(),
                "brute force found a witness but the decision procedure returned Holds"
            );
        }
        if let ConeDecision::Violated(w) = &decision {
            violated += 1;
            let value_c = qmod_combine(&w.c, &lambda).unwrap();
            let value_d = qmod_combine(&w.d, &mu).unwrap();
            assert_eq!(value_c, w.value);
            assert_eq!(value_d, w.value);
            assert_ne!(qmod_sign(&w.value).unwrap(), Sign::Zero);
            assert!(w.c.iter().all(|x| !x.is_negative()));
            assert!(w.d.iter().all(|x| !x.is_negative()));
            assert!(w.c.iter().any(|x| x.is_positive()));
        }
    }
    assert!(violated >= brute_hits);
    assert!(violated > 0, "seeded sample should contain violations");
    assert!(
        brute_hits > 0,
        "seeded sample should contain brute-force hits"
    );
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "runtime {elapsed:?} exceeds 30s"
    );
    pass(4, "cone decision vs brute force");
}

fn random_form(rng: &mut StdRng) -> HermitianForm {
    loop {
        let n = rng.gen_range(1..=2usize);
        let mut entries: BTreeMap<(Vec<u32>, Vec<u32>), Rational> = BTreeMap::new();
        let consts = [rat_int(1), rat_int(2), rat_int(3), rat(1, 2)];
        entries.insert(
            (vec![0; n], vec![0; n]),
            consts[rng.gen_range(0..consts.len())].clone(),
        );
        let extra = rng.gen_range(1..=2usize);
        for _ in 0..extra {
            let mono = |rng: &mut StdRng| -> Vec<u32> {
                (0..n).map(|_| rng.gen_range(0..=2u32)).collect()
            };
            let a = mono(rng);
            let b = mono(rng);
            let coeffs = [rat_int(1), rat_int(2), rat(1, 2), rat_int(-1), rat_int(3)];
            let c = coeffs[rng.gen_range(0..coeffs.len())].clone();
            if c.is_zero() {
                continue;
            }
            *entries
                .entry((a.clone(), b.clone()))
                .or_insert_with(Rational::zero) += &c;
            if a != b {
                *entries.entry((b, a)).or_insert_with(Rational::zero) += &c;
            }
        }
        entries.retain(|_, c| !c.is_zero());
        let Ok(form) = HermitianForm::from_entries(n, &entries) else {
            continue;
        };
        if form.constant_term().is_positive() && !form.is_constant() && form.entries().len() <= 5 {
            return form;
        }
    }
}

#[test]
fn criterion_5_factorization_round_trip() {
    let mut rng = StdRng::seed_from_u64(77);
    let scales = [rat(1, 2), rat_int(1), rat_int(2), rat_int(4)];
    for case in 0..50 {
        let h = random_form(&mut rng);
        let a = scales[rng.gen_range(0..scales.len())].clone();
        let m = rng.gen_range(1..=4u32);
        let p = form_pow(&h, m).unwrap().scale(&a);
        let got = factor_by_h(&p, &h).unwrap();
        assert_eq!(got, FactorResult { a: a.clone(), m }, "case {case}");

        // perturb one coefficient of the product
        let mut entries = p.entries();
        let keys: Vec<(Vec<u32>, Vec<u32>)> = entries.keys().cloned().collect();
        let key = keys[rng.gen_range(0..keys.len())].clone();
        let mirrored = (key.1.clone(), key.0.clone());
        *entries.get_mut(&key).unwrap() += rat_int(1);
        if mirrored != key {
            *entries.get_mut(&mirrored).unwrap() += rat_int(1);
        }
        let perturbed = HermitianForm::from_entries(p.n(), &entries).unwrap();
        if !perturbed.constant_term().is_positive() {
            continue;
        }
        match factor_by_h(&perturbed, &h) {
            Err(HermitianError::NotAPurePower(_)) => {}
            other => panic!("case {case}: perturbation not rejected: {other:?}"),
        }
    }
    pass(5, "pure-power factorization round trip");
}

fn alg(coeffs: &[&[i64]]) -> AlgebraicFunction {
    AlgebraicFunction::new(coeffs.iter().map(|c| QPoly::from_i64(c)).collect()).unwrap()
}

#[test]
fn criterion_6_puiseux_monodromy_suite() {
    let start = Instant::now();

    // Y^2 - z
    let f = alg(&[&[0, -1], &[], &[1]]);
    let locus = branch_locus(&f).unwrap();
    assert_eq!(
        locus
            .points
            .iter()
            .filter_map(|p| p.exact_rational())
            .collect::<Vec<_>>(),
        vec![rat_int(0)]
    );
    assert!(locus.includes_infinity);
    let cycles = newton_puiseux(&f, &Center::Rational(rat_int(0)), 6).unwrap();
    assert_eq!(cycles.len(), 1);
    assert_eq!(cycles[0].ramification, 2);
    assert_eq!(cycles[0].leading_exponent(), Some((1, 2)));
    assert!(cycles[0].exact);
    assert_eq!(
        classify_branching(&f, &Center::Rational(rat_int(0))).unwrap(),
        Branching::SimpleCyclic { period: 2 }
    );
    let act = monodromy_circle(&f, (rat_int(0), rat_int(0)), rat_int(1)).unwrap();
    assert_eq!(act.cycle_structure(), vec![2]);

    // Y^3 - z
    let f = alg(&[&[0, -1], &[], &[], &[1]]);
    let cycles = newton_puiseux(&f, &Center::Rational(rat_int(0)), 6).unwrap();
    assert_eq!(cycles.len(), 1);
    assert_eq!(cycles[0].ramification, 3);
    assert_eq!(cycles[0].leading_exponent(), Some((1, 3)));
    assert_eq!(
        classify_branching(&f, &Center::Rational(rat_int(0))).unwrap(),
        Branching::SimpleCyclic { period: 3 }
    );
    let act = monodromy_circle(&f, (rat_int(0), rat_int(0)), rat_int(1)).unwrap();
    assert_eq!(act.cycle_structure(), vec![3]);

    // Y^2 - z(z-1)
    let f = alg(&[&[0, 1, -1], &[], &[1]]);
    let locus = branch_locus(&f).unwrap();
    assert_eq!(
        locus
            .points
            .iter()
            .filter_map(|p| p.exact_rational())
            .collect::<Vec<_>>(),
        vec![rat_int(0), rat_int(1)]
    );
    assert!(!locus.includes_infinity);
    let cycles = newton_puiseux(&f, &Center::Rational(rat_int(0)), 8).unwrap();
    assert_eq!(cycles.len(), 1);
    assert_eq!(cycles[0].ramification, 2);
    assert_eq!(cycles[0].leading_exponent(), Some((1, 2)));
    assert_eq!(
        classify_branching(&f, &Center::Rational(rat_int(0))).unwrap(),
        Branching::SimpleCyclic { period: 2 }
    );
    let whole = monodromy_circle(&f, (rat(1, 2), rat_int(0)), rat_int(2)).unwrap();
    assert!(whole.is_identity());
    let m0 = monodromy_loci(&f, (rat(1, 2), rat(1, 2)), &[0]).unwrap();
    let m1 = monodromy_loci(&f, (rat(1, 2), rat(1, 2)), &[1]).unwrap();
    assert_eq!(m0.cycle_structure(), vec![2]);
    assert_eq!(m1.cycle_structure(), vec![2]);

    // Y^2 + 2zY + z^3
    let f = alg(&[&[0, 0, 0, 1], &[0, 2], &[1]]);
    let locus = branch_locus(&f).unwrap();
    assert_eq!(
        locus
            .points
            .iter()
            .filter_map(|p| p.exact_rational())
            .collect::<Vec<_>>(),
        vec![rat_int(0), rat_int(1)]
    );
    let cycles = newton_puiseux(&f, &Center::Rational(rat_int(0)), 8).unwrap();
    assert_eq!(cycles.len(), 2);
    assert!(cycles.iter().all(|c| c.ramification == 1));
    let leads: Vec<(i64, String)> = cycles
        .iter()
        .map(|c| {
            (
                c.leading_exponent().unwrap().0,
                c.leading_coefficient().unwrap().describe(&c.delta),
            )
        })
        .collect();
    assert_eq!(leads[0], (1, "-2".to_string()));
    assert_eq!(leads[1], (2, "-1/2".to_string()));
    assert_eq!(
        classify_branching(&f, &Center::Rational(rat_int(0))).unwrap(),
        Branching::NonBranching
    );

    // Y^2 - z^2 (1 + z)
    let f = alg(&[&[0, 0, -1, -1], &[], &[1]]);
    let cycles = newton_puiseux(&f, &Center::Rational(rat_int(0)), 8).unwrap();
    assert_eq!(cycles.len(), 2);
    assert!(cycles.iter().all(|c| c.ramification == 1));
    assert_eq!(
        classify_branching(&f, &Center::Rational(rat_int(0))).unwrap(),
        Branching::NonBranching
    );

    // substitution residuals across the suite: exact roots vanish
    // identically, truncated ones vanish beyond every stored exponent
    for coeffs in [
        vec![vec![0i64, -1], vec![], vec![1]],
        vec![vec![0, -1], vec![], vec![], vec![1]],
        vec![vec![0, 1, -1], vec![], vec![1]],
        vec![vec![0, 0, 0, 1], vec![0, 2], vec![1]],
        vec![vec![0, 0, -1, -1], vec![], vec![1]],
    ] {
        let refs: Vec<&[i64]> = coeffs.iter().map(Vec::as_slice).collect();
        let f = alg(&refs);
        let cycles = newton_puiseux(&f, &Center::Rational(rat_int(0)), 8).unwrap();
        let total: u32 = cycles.iter().map(|c| c.ramification).sum();
        assert_eq!(total as usize, f.degree(), "branch count");
        for c in &cycles {
            match c.residual_valuation {
                None => assert!(c.exact),
                Some(v) => {
                    let max_stored = c.terms.keys().last().copied().unwrap_or(0);
                    assert!(
                        v > max_stored,
                        "residual valuation {v} not beyond stored exponent {max_stored}"
                    );
                }
            }
        }
        // local monodromy matches the Puiseux ramification cycle structure
        let locus = branch_locus(&f).unwrap();
        for (idx, point) in locus.points.iter().enumerate() {
            let Some(e) = point.exact_rational() else {
                continue;
            };
            let local = newton_puiseux(&f, &Center::Rational(e), 6).unwrap();
            let mut rams: Vec<usize> = local.iter().map(|c| c.ramification as usize).collect();
            rams.sort_unstable_by(|a, b| b.cmp(a));
            let act = monodromy_loci(&f, (rat(1, 3), rat(2, 3)), &[idx]).unwrap();
            assert_eq!(
                act.cycle_structure(),
                rams,
                "local monodromy at point {idx}"
            );
        }
        // product of all local loops equals the large counterclockwise
        // circle, so together with the clockwise loop at infinity the
        // total is the identity
        let all: Vec<usize> = (0..locus.points.len()).collect();
        if !all.is_empty() {
            let composite = monodromy_loci(&f, (rat(1, 3), rat(2, 3)), &all).unwrap();
            let radius = rat_int(8);
            let big = monodromy_circle(&f, (rat(1, 3), rat(2, 3)), radius.clone()).unwrap();
            // traverse the other way for the loop around infinity
            let inf = {
                let back = monodromy_circle(&f, (rat(1, 3), rat(2, 3)), radius).unwrap();
                invert(&back.permutation)
            };
            assert_eq!(composite.permutation, big.permutation);
            let total_perm = compose(&composite.permutation, &inf);
            assert!(total_perm.iter().enumerate().all(|(i, &p)| i == p));
        }
    }

    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "runtime {elapsed:?} exceeds 10s"
    );
    pass(6, "puiseux and monodromy suite");
}

fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0usize; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

#[test]
fn criterion_7_min_ratio_property() {
    let b = QBasis::with_sqrt(rat_int(2)).unwrap();
    let mut rng = StdRng::seed_from_u64(4242);
    for _ in 0..1000 {
        let p = rng.gen_range(1..=4usize);
        let a: Vec<QModReal> = (0..p)
            .map(|_| random_positive_factor(&mut rng, &b))
            .collect();
        let bb: Vec<QModReal> = (0..p)
            .map(|_| random_positive_factor(&mut rng, &b))
            .collect();
        let i0 = min_ratio_index(&a, &bb).unwrap();
        for i in 0..p {
            // a_i * b_{i0} - b_i * a_{i0} >= 0, exactly
            let lhs = a[i].mul(&bb[i0]).unwrap();
            let rhs = bb[i].mul(&a[i0]).unwrap();
            let diff = lhs.sub(&rhs).unwrap();
            assert_ne!(
                qmod_sign(&diff).unwrap(),
                Sign::Negative,
                "index {i} vs {i0}"
            );
        }
    }
    pass(7, "minimum-ratio selection property");
}

fn random_unit_series(rng: &mut StdRng, order: u32) -> PolarizedSeries {
    loop {
        let n = rng.gen_range(1..=2usize);
        let mut s = PolarizedSeries::one(n, order);
        let terms = rng.gen_range(1..=3usize);
        for _ in 0..terms {
            let z_exp: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=2u32)).collect();
            let xi_exp: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=2u32)).collect();
            if z_exp.iter().all(|&e| e == 0) && xi_exp.iter().all(|&e| e == 0) {
                continue;
            }
            let coeffs = [rat_int(1), rat_int(2), rat(1, 2), rat_int(-1)];
            s.add_term(
                Exponents { z_exp, xi_exp },
                coeffs[rng.gen_range(0..coeffs.len())].clone(),
            );
        }
        if !s.constant_term().is_one() {
            continue;
        }
        let one = PolarizedSeries::one(s.n(), order);
        let log = series_log1p(&s.sub(&one).unwrap(), order).unwrap();
        if !mixed_part(&log).is_zero() {
            return s;
        }
    }
}

#[test]
fn criterion_8_power_law_soundness() {
    let b = QBasis::with_sqrt(rat_int(2)).unwrap();
    let weights = [
        QModReal::from_rational(&b, rat_int(1)),
        QModReal::new(b.clone(), vec![rat_int(0), rat_int(1)]).unwrap(),
    ];
    let mut rng = StdRng::seed_from_u64(99);
    for case in 0..40 {
        let order = 8;
        let p = random_unit_series(&mut rng, order);
        let a = rng.gen_range(1..=3u32);
        let w = weights[rng.gen_range(0..2)].clone();
        let pa = isokit::series::series_pow(&p, a, order).unwrap();
        let minus_wa = w.scale(&-Rational::from_integer(BigInt::from(a)));
        let parts =
            SeriesWithWeights::new(vec![(w.clone(), pa.clone()), (minus_wa.clone(), p.clone())]);
        let residuals = weighted_log_residual(&parts).unwrap();
        assert!(
            residuals.iter().all(PolarizedSeries::is_zero),
            "case {case}: power law must cancel exactly"
        );

        let perturbed = minus_wa
            .add(&QModReal::from_rational(&b, rat(1, 7)))
            .unwrap();
        let parts = SeriesWithWeights::new(vec![(w, pa), (perturbed, p)]);
        let residuals = weighted_log_residual(&parts).unwrap();
        assert!(
            residuals.iter().any(|r| !r.is_zero()),
            "case {case}: perturbed weight must surface"
        );
    }
    pass(8, "power-law verifier soundness");
}
