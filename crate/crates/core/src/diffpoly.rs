//! Commutative differential polynomial algebras and symmetric-function
//! utilities.
//!
//! Generators come in named families (`U`, `W`, `I`, ...) indexed by a
//! positive integer and a derivative order; `U_2^(1)` is the first derivative
//! of the second generator of the `U` family. The weight of `family_j^(d)` is
//! `j + d`, and the total derivative raises it by exactly one. All quantum
//! content lives elsewhere: generators here commute.

pub mod symfun;

use crate::coeff::{q, MultiPoly, RatFunc, Rational, Var};
use std::collections::BTreeMap;
use std::fmt;

/// A generator family tag, rendered as its character.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Family(pub char);

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One generator `family_index^(der)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DiffGen {
    pub family: Family,
    pub index: u16,
    pub der: u16,
}

impl DiffGen {
    pub fn new(family: Family, index: u16, der: u16) -> Self {
        assert!(index >= 1, "generator index starts at 1");
        DiffGen { family, index, der }
    }

    pub fn weight(&self) -> u32 {
        self.index as u32 + self.der as u32
    }

    pub fn derive(&self) -> DiffGen {
        DiffGen {
            der: self.der + 1,
            ..*self
        }
    }
}

impl fmt::Display for DiffGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.der == 0 {
            write!(f, "{}_{}", self.family, self.index)
        } else {
            write!(f, "{}_{}^({})", self.family, self.index, self.der)
        }
    }
}

/// A commutative monomial: sorted generators with multiplicities.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct DiffMono(Vec<(DiffGen, u16)>);

impl DiffMono {
    pub fn unit() -> Self {
        DiffMono(Vec::new())
    }

    pub fn gen(g: DiffGen) -> Self {
        DiffMono(vec![(g, 1)])
    }

    pub fn from_factors(mut factors: Vec<(DiffGen, u16)>) -> Self {
        factors.retain(|(_, m)| *m > 0);
        factors.sort_by_key(|(g, _)| *g);
        let mut merged: Vec<(DiffGen, u16)> = Vec::with_capacity(factors.len());
        for (g, m) in factors {
            match merged.last_mut() {
                Some((lg, lm)) if *lg == g => *lm += m,
                _ => merged.push((g, m)),
            }
        }
        DiffMono(merged)
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(DiffGen, u16)] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().map(|(g, m)| g.weight() * *m as u32).sum()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, m)| *m as u32).sum()
    }

    pub fn mul(&self, other: &DiffMono) -> DiffMono {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        DiffMono::from_factors(v)
    }

    /// Multiplicity of a generator.
    pub fn mult_of(&self, g: &DiffGen) -> u16 {
        self.0
            .iter()
            .find(|(h, _)| h == g)
            .map(|(_, m)| *m)
            .unwrap_or(0)
    }

    /// Removes one power of `g`; `None` if absent.
    pub fn remove_one(&self, g: &DiffGen) -> Option<DiffMono> {
        let pos = self.0.iter().position(|(h, _)| h == g)?;
        let mut v = self.0.clone();
        if v[pos].1 == 1 {
            v.remove(pos);
        } else {
            v[pos].1 -= 1;
        }
        Some(DiffMono(v))
    }

    pub fn contains_family(&self, fam: Family) -> bool {
        self.0.iter().any(|(g, _)| g.family == fam)
    }
}

impl fmt::Display for DiffMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .rev()
            .map(|(g, m)| {
                if *m == 1 {
                    g.to_string()
                } else {
                    format!("{}^{}", g, m)
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Sparse differential polynomial with rational-function coefficients.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct DiffPoly {
    terms: BTreeMap<DiffMono, RatFunc>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(RatFunc::one())
    }

    pub fn constant(c: RatFunc) -> Self {
        let mut p = Self::zero();
        p.add_term(DiffMono::unit(), c);
        p
    }

    pub fn gen(g: DiffGen) -> Self {
        let mut p = Self::zero();
        p.add_term(DiffMono::gen(g), RatFunc::one());
        p
    }

    pub fn monomial(m: DiffMono, c: RatFunc) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DiffMono, &RatFunc)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff_of(&self, m: &DiffMono) -> RatFunc {
        self.terms.get(m).cloned().unwrap_or_else(RatFunc::zero)
    }

    pub fn add_term(&mut self, m: DiffMono, c: RatFunc) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &DiffPoly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn sub_assign(&mut self, other: &DiffPoly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), -c);
        }
    }

    pub fn add(&self, other: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out.sub_assign(other);
        out
    }

    pub fn neg(&self) -> DiffPoly {
        DiffPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &RatFunc) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn scale_poly(&self, c: &MultiPoly) -> DiffPoly {
        self.scale(&RatFunc::from_poly(c.clone()))
    }

    pub fn pow(&self, n: u32) -> DiffPoly {
        let mut acc = DiffPoly::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// The canonical derivation: `der -> der + 1` on generators, extended by
    /// the Leibniz rule. Coefficients are constants for it.
    pub fn d_total(&self) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (mono, coeff) in &self.terms {
            for (g, m) in mono.factors() {
                let reduced = mono.remove_one(g).expect("factor present");
                let bumped = reduced.mul(&DiffMono::gen(g.derive()));
                out.add_term(bumped, coeff.scale(&q(*m as i64)));
            }
        }
        out
    }

    pub fn d_total_n(&self, n: u32) -> DiffPoly {
        let mut acc = self.clone();
        for _ in 0..n {
            acc = acc.d_total();
        }
        acc
    }

    /// Weight of a homogeneous polynomial (`None` when mixed or zero).
    pub fn weight(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.weight());
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    /// Partial derivative with respect to one generator.
    pub fn partial(&self, g: &DiffGen) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (mono, coeff) in &self.terms {
            let m = mono.mult_of(g);
            if m == 0 {
                continue;
            }
            let reduced = mono.remove_one(g).expect("present");
            out.add_term(reduced, coeff.scale(&q(m as i64)));
        }
        out
    }

    /// All generators occurring, with their maximal derivative order.
    pub fn gens_used(&self) -> Vec<DiffGen> {
        let mut out: Vec<DiffGen> = self
            .terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(g, _)| *g))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Sets every generator of the family to zero (keeps other terms).
    pub fn kill_family(&self, fam: Family) -> DiffPoly {
        DiffPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| !m.contains_family(fam))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Applies a map to every coefficient, dropping zeros.
    pub fn map_coeffs<F: Fn(&RatFunc) -> RatFunc>(&self, f: F) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Substitutes each generator by an image polynomial (an algebra morphism
    /// commuting with the total derivative: derivatives of generators go to
    /// derivatives of images).
    pub fn subst_gens<F>(&self, image_of: &F) -> DiffPoly
    where
        F: Fn(Family, u16) -> DiffPoly,
    {
        let mut out = DiffPoly::zero();
        for (mono, coeff) in &self.terms {
            let mut term = DiffPoly::constant(coeff.clone());
            for (g, m) in mono.factors() {
                let base = image_of(g.family, g.index);
                let img = base.d_total_n(g.der as u32);
                term = term.mul(&img.pow(*m as u32));
            }
            out.add_assign(&term);
        }
        out
    }
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.is_one() && !m.is_unit() {
                write!(f, "{}", m)?;
            } else if m.is_unit() {
                write!(f, "{}", c)?;
            } else if c.as_constant() == Some(crate::coeff::q(-1)) {
                write!(f, "-{}", m)?;
            } else if c.as_constant().is_some() || c.num().num_terms() <= 1 {
                write!(f, "{}*{}", c, m)?;
            } else {
                write!(f, "({})*{}", c, m)?;
            }
        }
        Ok(())
    }
}

/// Builds a rational constant quickly.
pub fn rc(n: i64) -> RatFunc {
    RatFunc::from_int(n)
}

/// Coefficient `nu^k` etc. as a rational function.
pub fn rv(v: Var) -> RatFunc {
    RatFunc::var(v)
}

/// Convenience: rational from a `Rational`.
pub fn rq(r: Rational) -> RatFunc {
    RatFunc::from_rational(r)
}

pub const FAM_U: Family = Family('U');
pub const FAM_W: Family = Family('W');
pub const FAM_V: Family = Family('V');
pub const FAM_I: Family = Family('I');

#[cfg(test)]
mod tests {
    use super::*;

    fn u(j: u16, d: u16) -> DiffGen {
        DiffGen::new(FAM_U, j, d)
    }

    #[test]
    fn d_total_examples() {
        // U_1 -> U_1^(1)
        let p = DiffPoly::gen(u(1, 0));
        assert_eq!(p.d_total(), DiffPoly::gen(u(1, 1)));

        // Leibniz on U_1 U_2
        let prod = DiffPoly::gen(u(1, 0)).mul(&DiffPoly::gen(u(2, 0)));
        let expect = DiffPoly::gen(u(1, 1))
            .mul(&DiffPoly::gen(u(2, 0)))
            .add(&DiffPoly::gen(u(1, 0)).mul(&DiffPoly::gen(u(2, 1))));
        assert_eq!(prod.d_total(), expect);

        // constants die
        assert!(DiffPoly::one().d_total().is_zero());
    }

    #[test]
    fn weight_bookkeeping() {
        let p = DiffPoly::gen(u(2, 1)).mul(&DiffPoly::gen(u(1, 0)));
        assert_eq!(p.weight(), Some(4));
        assert_eq!(p.d_total().weight(), Some(5));
    }

    #[test]
    fn rendering() {
        let p = DiffPoly::gen(u(2, 1)).mul(&DiffPoly::gen(u(1, 0)));
        assert_eq!(p.to_string(), "U_2^(1)*U_1");
    }

    #[test]
    fn partial_derivative() {
        // d/dU_1 (U_1^2 U_2) = 2 U_1 U_2
        let p = DiffPoly::gen(u(1, 0)).pow(2).mul(&DiffPoly::gen(u(2, 0)));
        let d = p.partial(&u(1, 0));
        let expect = DiffPoly::gen(u(1, 0))
            .mul(&DiffPoly::gen(u(2, 0)))
            .scale(&rc(2));
        assert_eq!(d, expect);
    }
}
