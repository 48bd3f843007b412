//! Rational functions `num/den` over the polynomial ring, kept reduced.
//!
//! Normal form: `gcd(num, den) = 1` and the denominator is monic in the
//! graded-lex leading term. With that convention two equal rational functions
//! have identical representations, so structural equality is semantic
//! equality.

use super::multipoly::{MultiPoly, Var};
use super::rational::{q, Rational};
use super::CoeffError;
use num::traits::One;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Gcd of two polynomials over the rationals, normalized monic.
///
/// Primitive pseudo-remainder sequences, recursing over the variables that
/// actually occur. Adequate for the small reduced fractions this crate
/// produces (Virasoro coefficients, parameter maps).
pub fn poly_gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let g = gcd_inner(a, b);
    make_monic(&g)
}

fn make_monic(p: &MultiPoly) -> MultiPoly {
    if p.is_zero() {
        return MultiPoly::zero();
    }
    let lc = p.leading_coeff();
    p.scale(&(q(1) / lc))
}

fn gcd_inner(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one();
    }
    // Main variable: first variable occurring in either operand.
    let v = *a
        .vars_used()
        .iter()
        .chain(b.vars_used().iter())
        .min()
        .expect("nonconstant operands use a variable");

    let (cont_a, pp_a) = content_and_primitive(a, v);
    let (cont_b, pp_b) = content_and_primitive(b, v);
    let cont_gcd = gcd_inner(&cont_a, &cont_b);

    let mut f = pp_a;
    let mut g = pp_b;
    if f.degree_in(v) < g.degree_in(v) {
        std::mem::swap(&mut f, &mut g);
    }
    loop {
        if g.is_zero() {
            let (_, pp) = content_and_primitive(&f, v);
            return &cont_gcd * &pp;
        }
        if g.degree_in(v) == 0 {
            // A nonzero v-free remainder of primitive operands: gcd in v is trivial,
            // but it may still share content in the other variables.
            let (_, pp_f) = content_and_primitive(&f, v);
            let shared = gcd_inner(&coeff_content(&pp_f, v), &g);
            return &cont_gcd * &shared;
        }
        let r = pseudo_rem(&f, &g, v);
        f = g;
        let (_, pp) = content_and_primitive(&r, v);
        g = pp;
    }
}

/// Content (gcd of the v-coefficients) and primitive part with respect to `v`.
fn content_and_primitive(p: &MultiPoly, v: Var) -> (MultiPoly, MultiPoly) {
    let cont = coeff_content(p, v);
    if cont.is_zero() {
        return (MultiPoly::zero(), MultiPoly::zero());
    }
    let pp = p.divide_exact(&cont).expect("content divides");
    (cont, pp)
}

fn coeff_content(p: &MultiPoly, v: Var) -> MultiPoly {
    let mut cont = MultiPoly::zero();
    for slice in p.slices_in_var(v) {
        if !slice.is_zero() {
            cont = gcd_inner(&cont, &slice);
        }
        if cont.is_one() || cont.is_constant() && !cont.is_zero() {
            return MultiPoly::one();
        }
    }
    if cont.is_zero() {
        MultiPoly::zero()
    } else {
        cont
    }
}

/// Pseudo-remainder of `f` by `g` in the variable `v`.
fn pseudo_rem(f: &MultiPoly, g: &MultiPoly, v: Var) -> MultiPoly {
    let dg = g.degree_in(v);
    let lc_g = g.coeff_in_var(v, dg as u16);
    let mut r = f.clone();
    while !r.is_zero() {
        let dr = r.degree_in(v);
        if dr < dg {
            break;
        }
        let lc_r = r.coeff_in_var(v, dr as u16);
        // r <- lc_g * r - lc_r * v^(dr-dg) * g
        let shift = MultiPoly::var(v).pow(dr - dg);
        r = &(&lc_g * &r) - &(&(&lc_r * &shift) * g);
    }
    r
}

/// A reduced rational function.
#[derive(Clone, PartialEq, Debug)]
pub struct RatFunc {
    num: MultiPoly,
    den: MultiPoly,
}

impl RatFunc {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFunc {
                num: MultiPoly::zero(),
                den: MultiPoly::one(),
            };
        }
        if den.is_one() {
            return RatFunc { num, den };
        }
        let g = poly_gcd(&num, &den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.divide_exact(&g).expect("gcd divides numerator"),
                den.divide_exact(&g).expect("gcd divides denominator"),
            )
        };
        let lc = den.leading_coeff();
        if !lc.is_one() {
            let inv = q(1) / lc;
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        RatFunc { num, den }
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        RatFunc {
            num: p,
            den: MultiPoly::one(),
        }
    }

    pub fn from_rational(c: Rational) -> Self {
        Self::from_poly(MultiPoly::constant(c))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(q(n))
    }

    pub fn zero() -> Self {
        Self::from_poly(MultiPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(MultiPoly::one())
    }

    pub fn var(v: Var) -> Self {
        Self::from_poly(MultiPoly::var(v))
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// Polynomial content, if the denominator is trivial.
    pub fn as_poly(&self) -> Option<&MultiPoly> {
        if self.den.is_one() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn as_constant(&self) -> Option<Rational> {
        self.as_poly().and_then(|p| p.as_constant())
    }

    pub fn inverse(&self) -> Result<RatFunc, CoeffError> {
        if self.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        Ok(RatFunc::new(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc, CoeffError> {
        Ok(self * &other.inverse()?)
    }

    /// Substitute a rational value for one variable.
    pub fn eval_var(&self, v: Var, value: &Rational) -> Result<RatFunc, CoeffError> {
        let den = self.den.eval_var(v, value);
        if den.is_zero() {
            return Err(CoeffError::DenominatorVanishes);
        }
        Ok(RatFunc::new(self.num.eval_var(v, value), den))
    }

    /// Substitute a rational function for one variable.
    pub fn subst_var(&self, v: Var, value: &RatFunc) -> Result<RatFunc, CoeffError> {
        let num = subst_poly_ratfunc(&self.num, v, value);
        let den = subst_poly_ratfunc(&self.den, v, value);
        if den.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        num.div(&den)
    }

    pub fn scale(&self, c: &Rational) -> RatFunc {
        RatFunc::new(self.num.scale(c), self.den.clone())
    }
}

/// Substitute a rational function into a polynomial (Horner in `v`).
pub fn subst_poly_ratfunc(p: &MultiPoly, v: Var, value: &RatFunc) -> RatFunc {
    let deg = p.degree_in(v);
    let mut acc = RatFunc::zero();
    for k in (0..=deg as u16).rev() {
        acc = &(&acc * value) + &RatFunc::from_poly(p.coeff_in_var(v, k));
    }
    acc
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.den == rhs.den {
            return RatFunc::new(&self.num + &rhs.num, self.den.clone());
        }
        RatFunc::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatFunc::from_poly(&self.num * &rhs.num);
        }
        RatFunc::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::qr;

    fn nu() -> MultiPoly {
        MultiPoly::var(Var::Nu)
    }
    fn h() -> MultiPoly {
        MultiPoly::var(Var::Hbar)
    }

    #[test]
    fn gcd_of_products() {
        let a = &(&nu() + &h()).pow(2) * &nu();
        let b = &(&nu() + &h()) * &h();
        let g = poly_gcd(&a, &b);
        assert_eq!(g, make_monic(&(&nu() + &h())));
    }

    #[test]
    fn reduction_is_canonical() {
        // (nu^2 - hbar^2) / (2nu + 2hbar) == (nu - hbar)/2
        let r = RatFunc::new(
            &(&nu() * &nu()) - &(&h() * &h()),
            (&nu() + &h()).scale(&q(2)),
        );
        assert_eq!(r.den(), &MultiPoly::one());
        assert_eq!(r.num(), &(&nu() - &h()).scale(&qr(1, 2)));
    }

    #[test]
    fn exact_cancellation_in_arithmetic() {
        let a = RatFunc::new(MultiPoly::one(), nu());
        let b = RatFunc::new(&nu() - &MultiPoly::one(), nu());
        let sum = &a + &b;
        // 1/nu + (nu-1)/nu = 1
        assert!(sum.is_one());
    }

    #[test]
    fn substitution() {
        // lambda -> (nu-1)/nu inside lambda^2
        let p = MultiPoly::var(Var::Lambda).pow(2);
        let v = RatFunc::new(&nu() - &MultiPoly::one(), nu());
        let r = subst_poly_ratfunc(&p, Var::Lambda, &v);
        let expect = RatFunc::new((&nu() - &MultiPoly::one()).pow(2), nu().pow(2));
        assert_eq!(r, expect);
    }
}
