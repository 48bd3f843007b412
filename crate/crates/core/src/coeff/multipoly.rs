//! Sparse multivariate polynomials over the crate-wide variable alphabet.
//!
//! The alphabet is fixed once: the rank parameters `nu`, `n` and the tensor
//! copies `nu1`, `nu2`, `nu3`, the quantization parameter `hbar`, the symbol
//! orders `lambda`, `mu`, and the central charge `c`. Every polynomial carries
//! exponent vectors over the full alphabet; unused variables simply stay at
//! exponent zero. Terms are kept in a `BTreeMap` under graded-lexicographic
//! order, so iteration, equality, rendering and serialization are all
//! canonical by construction.

use super::rational::{q, Rational};
use super::CoeffError;
use num::traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Number of variables in the fixed alphabet.
pub const VAR_COUNT: usize = 9;

/// A variable of the coefficient ring.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Var {
    /// Continued rank parameter.
    Nu = 0,
    /// Quantization parameter.
    Hbar = 1,
    /// Integer rank used during sampling and interpolation.
    N = 2,
    /// Symbol order of a left factor.
    Lambda = 3,
    /// Symbol order of a right factor.
    Mu = 4,
    /// Central charge.
    C = 5,
    /// Rank of the first tensor factor.
    Nu1 = 6,
    /// Rank of the second tensor factor.
    Nu2 = 7,
    /// Rank of the third tensor factor.
    Nu3 = 8,
}

impl Var {
    pub const ALL: [Var; VAR_COUNT] = [
        Var::Nu,
        Var::Hbar,
        Var::N,
        Var::Lambda,
        Var::Mu,
        Var::C,
        Var::Nu1,
        Var::Nu2,
        Var::Nu3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Var::Nu => "nu",
            Var::Hbar => "hbar",
            Var::N => "n",
            Var::Lambda => "lambda",
            Var::Mu => "mu",
            Var::C => "c",
            Var::Nu1 => "nu1",
            Var::Nu2 => "nu2",
            Var::Nu3 => "nu3",
        }
    }
}

/// Exponent vector over the full alphabet.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Mono(pub [u16; VAR_COUNT]);

impl Mono {
    pub fn unit() -> Self {
        Mono([0; VAR_COUNT])
    }

    pub fn var(v: Var) -> Self {
        let mut e = [0; VAR_COUNT];
        e[v as usize] = 1;
        Mono(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a = a.checked_add(*b).expect("exponent overflow");
        }
        Mono(e)
    }

    /// Componentwise division; `None` if any exponent would go negative.
    pub fn div(&self, other: &Mono) -> Option<Mono> {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a = a.checked_sub(*b)?;
        }
        Some(Mono(e))
    }
}

// Graded-lexicographic: lower total degree first, ties broken lexicographically
// in alphabet order. BTreeMap iteration is therefore ascending grlex.
impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Invariant: no zero coefficients are stored.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Mono, Rational>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(q(1))
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert(Mono::unit(), c);
        }
        p
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(q(n))
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(Mono::var(v), q(1))
    }

    pub fn monomial(m: Mono, c: Rational) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.contains_key(&Mono::unit()))
    }

    /// The constant value, if the polynomial has no variable dependence.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.terms.is_empty() {
            return Some(q(0));
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&Mono::unit()) {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, m: Mono, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &MultiPoly) {
        for (m, c) in &other.terms {
            self.add_term(*m, c.clone());
        }
    }

    pub fn sub_assign(&mut self, other: &MultiPoly) {
        for (m, c) in &other.terms {
            self.add_term(*m, -c.clone());
        }
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return Self::zero();
        }
        MultiPoly {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn mul_mono(&self, m: &Mono, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return Self::zero();
        }
        MultiPoly {
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> MultiPoly {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Degree in one variable.
    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms
            .keys()
            .map(|m| m.0[v as usize] as u32)
            .max()
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    /// Leading term in graded-lex order.
    pub fn leading(&self) -> Option<(&Mono, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Rational {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(|| q(0))
    }

    /// Variables that actually occur.
    pub fn vars_used(&self) -> Vec<Var> {
        Var::ALL
            .iter()
            .copied()
            .filter(|&v| self.terms.keys().any(|m| m.0[v as usize] > 0))
            .collect()
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.0[v as usize] > 0)
    }

    /// Coefficient of `v^k`, as a polynomial in the remaining variables.
    pub fn coeff_in_var(&self, v: Var, k: u16) -> MultiPoly {
        let mut p = MultiPoly::zero();
        for (m, c) in &self.terms {
            if m.0[v as usize] == k {
                let mut e = *m;
                e.0[v as usize] = 0;
                p.add_term(e, c.clone());
            }
        }
        p
    }

    /// Substitute a rational value for one variable.
    pub fn eval_var(&self, v: Var, value: &Rational) -> MultiPoly {
        let mut p = MultiPoly::zero();
        for (m, c) in &self.terms {
            let k = m.0[v as usize];
            let mut e = *m;
            e.0[v as usize] = 0;
            let mut factor = c.clone();
            for _ in 0..k {
                factor *= value;
            }
            p.add_term(e, factor);
        }
        p
    }

    /// Substitute a polynomial for one variable.
    pub fn subst_var(&self, v: Var, value: &MultiPoly) -> MultiPoly {
        // Horner in v: collect by exponent, fold from the top.
        let deg = self.degree_in(v);
        let mut acc = MultiPoly::zero();
        for k in (0..=deg as u16).rev() {
            acc = &(&acc * value) + &self.coeff_in_var(v, k);
        }
        acc
    }

    /// Formal derivative with respect to one variable.
    pub fn deriv(&self, v: Var) -> MultiPoly {
        let mut p = MultiPoly::zero();
        for (m, c) in &self.terms {
            let k = m.0[v as usize];
            if k == 0 {
                continue;
            }
            let mut e = *m;
            e.0[v as usize] = k - 1;
            p.add_term(e, c * q(k as i64));
        }
        p
    }

    /// Exact division; `None` when the divisor does not divide exactly.
    pub fn divide_exact(&self, divisor: &MultiPoly) -> Option<MultiPoly> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(MultiPoly::zero());
        }
        let (lm, lc) = divisor.leading().unwrap();
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero();
        while let Some((rm, rc)) = rem.leading() {
            let m = rm.div(lm)?;
            let c = rc / lc;
            quot.add_term(m, c.clone());
            rem.sub_assign(&divisor.mul_mono(&m, &c));
        }
        Some(quot)
    }

    /// Splits into graded slices by the exponent of one variable, index = exponent.
    pub fn slices_in_var(&self, v: Var) -> Vec<MultiPoly> {
        let deg = self.degree_in(v) as usize;
        let mut out = vec![MultiPoly::zero(); deg + 1];
        for (m, c) in &self.terms {
            let k = m.0[v as usize] as usize;
            let mut e = *m;
            e.0[v as usize] = 0;
            out[k].add_term(e, c.clone());
        }
        out
    }

    /// Maps every monomial exponent of `from` onto `to` (used for `n -> nu`).
    pub fn rename_var(&self, from: Var, to: Var) -> MultiPoly {
        assert_ne!(from, to);
        let mut p = MultiPoly::zero();
        for (m, c) in &self.terms {
            let mut e = *m;
            let k = e.0[from as usize];
            e.0[from as usize] = 0;
            e.0[to as usize] = e.0[to as usize].checked_add(k).expect("exponent overflow");
            p.add_term(e, c.clone());
        }
        p
    }

    /// The constant value after checking nothing variable survives.
    pub fn expect_constant(&self) -> Result<Rational, CoeffError> {
        self.as_constant()
            .ok_or_else(|| CoeffError::NotConstant(self.to_string()))
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out.sub_assign(rhs);
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

fn fmt_coeff(c: &Rational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Leading (highest grlex) term first.
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let mut factors: Vec<String> = Vec::new();
            for v in Var::ALL {
                let e = m.0[v as usize];
                if e == 1 {
                    factors.push(v.name().to_string());
                } else if e > 1 {
                    factors.push(format!("{}^{}", v.name(), e));
                }
            }
            let abs = c.abs();
            let show_coeff = factors.is_empty() || !abs.is_one();
            let body = if show_coeff && !factors.is_empty() {
                format!("{}*{}", fmt_coeff(&abs), factors.join("*"))
            } else if factors.is_empty() {
                fmt_coeff(&abs)
            } else {
                factors.join("*")
            };
            if idx == 0 {
                if c.is_negative() {
                    write!(f, "-{}", body)?;
                } else {
                    write!(f, "{}", body)?;
                }
            } else if c.is_negative() {
                write!(f, " - {}", body)?;
            } else {
                write!(f, " + {}", body)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::qr;

    fn x() -> MultiPoly {
        MultiPoly::var(Var::Nu)
    }
    fn y() -> MultiPoly {
        MultiPoly::var(Var::Hbar)
    }

    #[test]
    fn arithmetic_basics() {
        let p = &(&x() + &y()) * &(&x() - &y());
        let q_ = &(&x() * &x()) - &(&y() * &y());
        assert_eq!(p, q_);
    }

    #[test]
    fn exact_division() {
        let p = &(&x() + &y()).pow(3) * &x();
        let d = (&x() + &y()).pow(2);
        let quot = p.divide_exact(&d).unwrap();
        assert_eq!(quot, &(&x() + &y()) * &x());
        assert!(x().divide_exact(&y()).is_none());
    }

    #[test]
    fn substitution_and_eval() {
        let p = &(&x() * &x()) + &MultiPoly::one();
        assert_eq!(p.eval_var(Var::Nu, &qr(1, 2)), MultiPoly::constant(qr(5, 4)));
        let s = p.subst_var(Var::Nu, &(&y() + &MultiPoly::one()));
        // (hbar+1)^2 + 1
        let expect = &(&y() + &MultiPoly::one()).pow(2) + &MultiPoly::one();
        assert_eq!(s, expect);
    }

    #[test]
    fn rendering_is_sorted_and_explicit() {
        let p = &(&x().pow(2) - &(&y() * &MultiPoly::from_int(3))) + &MultiPoly::constant(qr(1, 2));
        assert_eq!(p.to_string(), "nu^2 - 3*hbar + 1/2");
    }

    #[test]
    fn grlex_order() {
        // nu^2 > nu*hbar > hbar (degree first, then lex within a degree)
        let m1 = Mono::var(Var::Nu).mul(&Mono::var(Var::Nu));
        let m2 = Mono::var(Var::Nu).mul(&Mono::var(Var::Hbar));
        let m3 = Mono::var(Var::Hbar);
        assert!(m1 > m2);
        assert!(m2 > m3);
    }
}
