//! Exact scalar arithmetic: arbitrary-precision rationals, sparse multivariate
//! polynomials over a fixed variable alphabet, and normalized rational functions.
//!
//! Everything downstream (differential polynomials, Fock-space coefficients,
//! structure tables) is built on these three layers. No floating point is used
//! anywhere in the crate.

mod combinat;
mod multipoly;
mod ratfunc;
mod rational;

pub use combinat::{
    binom_general, binom_nonneg, falling_factorial, iterated_power_sum, lagrange_interpolate, power_sum,
    sum_first_n, symbolic_binomial,
};
pub use multipoly::{Mono, MultiPoly, Var, VAR_COUNT};
pub use ratfunc::{poly_gcd, RatFunc};
pub use rational::{q, qr, Rational};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoeffError {
    #[error("duplicate interpolation point {0}")]
    DuplicatePoint(Rational),
    #[error("interpolation needs at least one sample")]
    EmptySamples,
    #[error("division by zero polynomial")]
    DivisionByZero,
    #[error("inexact division: {0}")]
    InexactDivision(String),
    #[error("denominator vanishes at evaluation point")]
    DenominatorVanishes,
    #[error("expected a constant polynomial, found {0}")]
    NotConstant(String),
}
