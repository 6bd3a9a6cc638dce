//! Verifiable identity instances `h^r = prod H_l^{mu_l} * prod Q_j^{-lambda_j}`.
//!
//! Verification works in the log domain: the weighted sum of logarithms is
//! grouped by basis coordinate and the mixed part of every coordinate series
//! must vanish. Irrational exponents never leave the weight slot, so all
//! series arithmetic stays rational.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::hermitian::{factor_by_h, FactorResult, HermitianError, HermitianForm};
use crate::scalar::{QModReal, Rational};
use crate::series::{weighted_log_residual, PolarizedSeries, SeriesError, SeriesWithWeights};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedForm {
    pub weight: QModReal,
    pub form: HermitianForm,
}

/// One instance of the transcendental identity, with `h`, the exponent `r`,
/// the positively weighted factors and the negatively weighted factors.
#[derive(Debug, Clone)]
pub struct IdentityInstance {
    pub h: HermitianForm,
    pub r: QModReal,
    pub f_factors: Vec<WeightedForm>,
    pub g_factors: Vec<WeightedForm>,
}

/// Outcome of a residual check at one truncation order.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub order: u32,
    /// One rational-coefficient residual series per basis coordinate.
    pub residuals: Vec<PolarizedSeries>,
    pub all_zero: bool,
    /// Order at which a zero residual proves the identity outright
    /// (all inputs are polynomial, so clearing denominators turns the
    /// identity into a polynomial equation of bounded degree).
    pub proof_order: u64,
    /// Whether this run's order reached `proof_order`.
    pub conclusive: bool,
    /// Pure-power factorizations of each factor against `h`, when they exist.
    pub f_factorizations: Vec<Option<FactorResult>>,
    pub g_factorizations: Vec<Option<FactorResult>>,
}

impl IdentityInstance {
    fn parts(&self, order: u32) -> SeriesWithWeights {
        let mut parts: Vec<(QModReal, PolarizedSeries)> = Vec::new();
        for wf in &self.f_factors {
            parts.push((wf.weight.clone(), wf.form.to_series(order)));
        }
        for wf in &self.g_factors {
            parts.push((wf.weight.neg(), wf.form.to_series(order)));
        }
        parts.push((self.r.neg(), self.h.to_series(order)));
        SeriesWithWeights::new(parts)
    }

    /// Mixed-part residual per basis coordinate at the given order.
    pub fn residual(&self, order: u32) -> Result<Vec<PolarizedSeries>, SeriesError> {
        weighted_log_residual(&self.parts(order))
    }

    /// Degree of the polynomial identity obtained by clearing weight
    /// denominators coordinate-wise; a zero residual at this order is a
    /// proof, not a sampling.
    pub fn proof_order(&self) -> u64 {
        let basis_len = self.r.basis().len();
        let mut weighted: Vec<(&QModReal, u64)> = Vec::new();
        for wf in &self.f_factors {
            weighted.push((&wf.weight, u64::from(wf.form.max_total_degree())));
        }
        for wf in &self.g_factors {
            weighted.push((&wf.weight, u64::from(wf.form.max_total_degree())));
        }
        weighted.push((&self.r, u64::from(self.h.max_total_degree())));
        let mut bound = 0u64;
        for c in 0..basis_len {
            let mut lcm = BigInt::one();
            for (w, _) in &weighted {
                lcm = lcm.lcm(w.coords()[c].denom());
            }
            let mut total = BigInt::zero();
            for (w, deg) in &weighted {
                let scaled = (&w.coords()[c] * Rational::from_integer(lcm.clone())).abs();
                total += scaled.to_integer() * BigInt::from(*deg);
            }
            let coord_bound: u64 = total.try_into().unwrap_or(u64::MAX);
            bound = bound.max(coord_bound);
        }
        bound
    }

    /// Run the residual check and, when possible, factor every form as a
    /// pure power of `h`.
    pub fn verify(&self, order: u32) -> Result<VerifyReport, SeriesError> {
        let residuals = self.residual(order)?;
        let all_zero = residuals.iter().all(PolarizedSeries::is_zero);
        let proof_order = self.proof_order();
        let factor = |wf: &WeightedForm| -> Option<FactorResult> {
            match factor_by_h(&wf.form, &self.h) {
                Ok(r) => Some(r),
                Err(HermitianError::NotAPurePower(_)) => None,
                Err(_) => None,
            }
        };
        Ok(VerifyReport {
            order,
            all_zero,
            proof_order,
            conclusive: u64::from(order) >= proof_order,
            f_factorizations: self.f_factors.iter().map(factor).collect(),
            g_factorizations: self.g_factors.iter().map(factor).collect(),
            residuals,
        })
    }

    /// Default working order: twice the largest total degree among the
    /// input forms, with a floor of 2.
    pub fn default_order(&self) -> u32 {
        let mut d = self.h.max_total_degree();
        for wf in self.f_factors.iter().chain(&self.g_factors) {
            d = d.max(wf.form.max_total_degree());
        }
        (2 * d).max(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{example62_construct, form_from_map, MapTuple};
    use crate::scalar::{rat, rat_int, QBasis};

    #[test]
    fn trivial_identity_mu_one() {
        // mu = (1), no lambda, m = (1): h_1 = 1 + |z|^2 equals h.
        let b = QBasis::rational();
        let mu = vec![QModReal::from_rational(&b, rat_int(1))];
        let inst =
            example62_construct(&mu, &[], &[1], &[], &[0], &[], &MapTuple::empty(1)).unwrap();
        let report = inst.verify(6).unwrap();
        assert!(report.all_zero);
        assert!(report.conclusive);
    }

    #[test]
    fn example_62_weights() {
        // basis {1, sqrt2}; lambda = (sqrt2), mu = (sqrt2 + 1/4, 1/4),
        // m = (2,2), n = (2), m' = n' = 0.
        let b = QBasis::with_sqrt(rat_int(2)).unwrap();
        let mu = vec![
            QModReal::new(b.clone(), vec![rat(1, 4), rat_int(1)]).unwrap(),
            QModReal::new(b.clone(), vec![rat(1, 4), rat_int(0)]).unwrap(),
        ];
        let lambda = vec![QModReal::new(b.clone(), vec![rat_int(0), rat_int(1)]).unwrap()];
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
        assert!(report.all_zero);
        // every factor is a pure power of h = 1 + z xi
        for f in report
            .f_factorizations
            .iter()
            .chain(&report.g_factorizations)
        {
            let f = f.as_ref().expect("pure power");
            assert_eq!(f.a, rat_int(1));
            assert_eq!(f.m, 2);
        }
    }

    #[test]
    fn example_62_with_nontrivial_f() {
        // mu = (2, 1), lambda = (3), m' = (1, 1), n' = (1), f = (z^2);
        // m = (1, 2), n = (1) satisfies 1*2 + 2*1 = 3*1 + 1.
        let b = QBasis::rational();
        let mu = vec![
            QModReal::from_rational(&b, rat_int(2)),
            QModReal::from_rational(&b, rat_int(1)),
        ];
        let lambda = vec![QModReal::from_rational(&b, rat_int(3))];
        let f = MapTuple::new(
            1,
            vec![crate::hermitian::MapComponent::monomial(
                vec![2],
                crate::hermitian::MapCoeff::rational(rat_int(1)),
            )],
        );
        let inst = example62_construct(&mu, &lambda, &[1, 2], &[1], &[1, 1], &[1], &f).unwrap();
        let report = inst.verify(10).unwrap();
        assert!(report.all_zero);
    }

    #[test]
    fn construction_cancels_at_every_tested_order() {
        let b = QBasis::with_sqrt(rat_int(2)).unwrap();
        let mu = vec![
            QModReal::new(b.clone(), vec![rat(1, 4), rat_int(1)]).unwrap(),
            QModReal::new(b.clone(), vec![rat(1, 4), rat_int(0)]).unwrap(),
        ];
        let lambda = vec![QModReal::new(b.clone(), vec![rat_int(0), rat_int(1)]).unwrap()];
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
        for order in [2u32, 4, 6, 8, 12, 16] {
            let residuals = inst.residual(order).unwrap();
            assert!(
                residuals.iter().all(PolarizedSeries::is_zero),
                "residual must vanish at order {order}"
            );
        }
    }

    #[test]
    fn precondition_failure_reported() {
        let b = QBasis::rational();
        let mu = vec![QModReal::from_rational(&b, rat_int(1))];
        let err =
            example62_construct(&mu, &[], &[2], &[], &[0], &[], &MapTuple::empty(1)).unwrap_err();
        assert!(matches!(err, HermitianError::PreconditionViolated(_)));
    }

    #[test]
    fn perturbed_weight_breaks_residual() {
        let b = QBasis::rational();
        let mu = vec![QModReal::from_rational(&b, rat_int(1))];
        let mut inst =
            example62_construct(&mu, &[], &[1], &[], &[0], &[], &MapTuple::empty(1)).unwrap();
        inst.f_factors[0].weight = QModReal::from_rational(&b, rat(3, 2));
        let report = inst.verify(6).unwrap();
        assert!(!report.all_zero);
    }

    #[test]
    fn verify_reports_factor_of_plain_form() {
        let b = QBasis::rational();
        let h = form_from_map(&MapTuple::identity(1)).unwrap();
        let inst = IdentityInstance {
            h: h.clone(),
            r: QModReal::from_rational(&b, rat_int(2)),
            f_factors: vec![WeightedForm {
                weight: QModReal::from_rational(&b, rat_int(1)),
                form: crate::hermitian::form_pow(&h, 2).unwrap(),
            }],
            g_factors: vec![],
        };
        let report = inst.verify(inst.default_order()).unwrap();
        assert!(report.all_zero);
        assert_eq!(report.f_factorizations[0].as_ref().unwrap().m, 2);
    }
}
