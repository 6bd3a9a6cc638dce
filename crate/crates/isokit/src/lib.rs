//! Exact arithmetic for the functional identities that govern local
//! holomorphic isometries into products of complex projective spaces.
//!
//! The crate is organized around five concerns:
//!
//! * [`scalar`] — rationals and real conformal factors presented as exact
//!   coordinates over a declared basis of real constants;
//! * [`series`] — truncated formal power series in the polarized variables
//!   `(z, xi)` with exact rational coefficients;
//! * [`hermitian`] — Gram-matrix algebra for polarized potentials of the
//!   shape `1 + F(z)·F̄(xi)`, including Veronese powers, products,
//!   resolvability and pure-power factorization;
//! * [`conformal`] — decision procedures on the conformal factors: the
//!   nonnegative-rational cone condition, the bounded integer factor
//!   equation and minimum-ratio selection;
//! * [`puiseux`] — one-variable algebraic functions: branch loci,
//!   Newton–Puiseux expansions, monodromy and branching classification.
//!
//! Everything outside `puiseux::monodromy` is exact; no floating point
//! enters any verdict.

pub mod conformal;
pub mod expr;
pub mod hermitian;
pub mod identity;
pub mod puiseux;
pub mod scalar;
pub mod series;

pub use scalar::{QBasis, QModReal, Rational, Sign};
pub use series::PolarizedSeries;
