//! Arbitrary-precision rational scalars.
//!
//! `num::BigRational` already maintains the invariants we need (lowest terms,
//! positive denominator), so the field type is an alias plus a few
//! constructors used throughout the crate.

use num::BigRational;

/// Exact rational scalar, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Integer as a rational.
pub fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// The fraction `n/d`.
pub fn qr(n: i64, d: i64) -> Rational {
    assert!(d != 0, "zero denominator");
    Rational::new(n.into(), d.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::traits::Zero;

    #[test]
    fn lowest_terms_and_sign() {
        let x = qr(4, -6);
        assert_eq!(x, qr(-2, 3));
        assert!(x.denom() > &num::BigInt::zero());
    }
}
