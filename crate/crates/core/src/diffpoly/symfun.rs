//! Symmetric functions in finitely many variables, in the monomial and
//! elementary bases.
//!
//! `SymPoly` is a plain sparse polynomial in `x_1..x_n`; partitions index the
//! monomial symmetric functions `m_pi` and the elementary ones `e_r =
//! m_(1^r)`. Conversion to the elementary basis is the classical triangular
//! reduction on the lex-leading partition.

use crate::coeff::{q, Rational};
use num::traits::Zero;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A partition: weakly decreasing positive parts.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Partition(Vec<u16>);

impl Partition {
    pub fn new(mut parts: Vec<u16>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    /// `(1^r)`.
    pub fn ones(r: u16) -> Self {
        Partition(vec![1; r as usize])
    }

    /// `(2, 1^k)`.
    pub fn two_ones(k: u16) -> Self {
        let mut v = vec![2];
        v.extend(std::iter::repeat_n(1, k as usize));
        Partition(v)
    }

    /// `(2, 2, 1^k)`.
    pub fn two_two_ones(k: u16) -> Self {
        let mut v = vec![2, 2];
        v.extend(std::iter::repeat_n(1, k as usize));
        Partition(v)
    }

    pub fn parts(&self) -> &[u16] {
        &self.0
    }

    pub fn size(&self) -> u32 {
        self.0.iter().map(|&p| p as u32).sum()
    }

    pub fn length(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})",
            self.0
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}

/// A sparse polynomial in `nvars` commuting variables with rational
/// coefficients; exponent vectors are the keys.
#[derive(Clone, PartialEq, Debug)]
pub struct SymPoly {
    pub nvars: usize,
    terms: BTreeMap<Vec<u16>, Rational>,
}

impl SymPoly {
    pub fn zero(nvars: usize) -> Self {
        SymPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], q(1));
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &Rational)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, exps: Vec<u16>, c: Rational) {
        assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
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

    pub fn add_assign(&mut self, other: &SymPoly) {
        assert_eq!(self.nvars, other.nvars);
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c.clone());
        }
    }

    pub fn sub_assign(&mut self, other: &SymPoly) {
        assert_eq!(self.nvars, other.nvars);
        for (e, c) in &other.terms {
            self.add_term(e.clone(), -c.clone());
        }
    }

    pub fn scale(&self, c: &Rational) -> SymPoly {
        if c.is_zero() {
            return SymPoly::zero(self.nvars);
        }
        SymPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &SymPoly) -> SymPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = SymPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u16> = e1.iter().zip(e2.iter()).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> SymPoly {
        let mut acc = SymPoly::one(self.nvars);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Lex-greatest exponent vector (the leading partition for symmetric input).
    fn leading(&self) -> Option<(&Vec<u16>, &Rational)> {
        self.terms.iter().next_back()
    }
}

/// Monomial symmetric function `m_pi` in `n` variables.
pub fn m_poly(pi: &Partition, n: usize) -> SymPoly {
    let mut out = SymPoly::zero(n);
    if pi.length() > n {
        return out;
    }
    let mut base = vec![0u16; n];
    for (i, &p) in pi.parts().iter().enumerate() {
        base[i] = p;
    }
    base.sort_unstable();
    // Distinct permutations of the padded partition.
    let mut seen: BTreeSet<Vec<u16>> = BTreeSet::new();
    permute_distinct(&mut base.clone(), 0, &mut seen);
    for e in seen {
        out.add_term(e, q(1));
    }
    out
}

fn permute_distinct(v: &mut Vec<u16>, k: usize, out: &mut BTreeSet<Vec<u16>>) {
    if k == v.len() {
        out.insert(v.clone());
        return;
    }
    let mut used = BTreeSet::new();
    for i in k..v.len() {
        if !used.insert(v[i]) {
            continue;
        }
        v.swap(k, i);
        permute_distinct(v, k + 1, out);
        v.swap(k, i);
    }
}

/// Elementary symmetric function `e_r` in `n` variables.
pub fn e_poly(r: u16, n: usize) -> SymPoly {
    m_poly(&Partition::ones(r), n)
}

/// Power sum `p_k` in `n` variables.
pub fn p_poly(k: u16, n: usize) -> SymPoly {
    m_poly(&Partition::new(vec![k]), n)
}

/// A polynomial in the elementary symmetric functions `e_1..e_n`; keys are
/// exponent vectors `(a_1..a_n)` standing for `e_1^{a_1} ... e_n^{a_n}`.
pub type EPoly = BTreeMap<Vec<u16>, Rational>;

/// Expands an `EPoly` back into the underlying variables.
pub fn expand_e(ep: &EPoly, n: usize) -> SymPoly {
    let mut out = SymPoly::zero(n);
    for (exps, c) in ep {
        let mut term = SymPoly::one(n);
        for (r, &a) in exps.iter().enumerate() {
            if a > 0 {
                term = term.mul(&e_poly(r as u16 + 1, n).pow(a as u32));
            }
        }
        out.add_assign(&term.scale(c));
    }
    out
}

/// Writes a symmetric polynomial as a polynomial in `e_1..e_n` by triangular
/// reduction on the leading partition. Panics if the input is not symmetric
/// (the reduction would not terminate otherwise, so a step limit guards it).
pub fn sym_to_elementary(f: &SymPoly) -> EPoly {
    let n = f.nvars;
    let mut rem = f.clone();
    let mut out: EPoly = BTreeMap::new();
    let mut guard = 0usize;
    while let Some((lead, coeff)) = rem.leading() {
        guard += 1;
        assert!(guard < 200_000, "elementary reduction did not terminate");
        let coeff = coeff.clone();
        let lambda = lead.clone();
        assert!(
            lambda.windows(2).all(|w| w[0] >= w[1]),
            "input is not symmetric: leading term {:?} is not dominant",
            lambda
        );
        // e_exps[i] counts copies of e_{i+1}: a_i = lambda_i - lambda_{i+1}.
        let mut e_exps = vec![0u16; n];
        for i in 0..lambda.len() {
            let next = if i + 1 < lambda.len() { lambda[i + 1] } else { 0 };
            e_exps[i] = lambda[i] - next;
        }
        let mut subtract = SymPoly::one(n);
        for (i, &a) in e_exps.iter().enumerate() {
            if a > 0 {
                subtract = subtract.mul(&e_poly(i as u16 + 1, n).pow(a as u32));
            }
        }
        rem.sub_assign(&subtract.scale(&coeff));
        *out.entry(e_exps.clone()).or_insert_with(|| q(0)) += coeff;
        out.retain(|_, c| !c.is_zero());
    }
    out
}

/// Expands a symmetric polynomial in the monomial basis `m_pi`.
pub fn sym_to_monomial(f: &SymPoly) -> BTreeMap<Partition, Rational> {
    let mut rem = f.clone();
    let mut out: BTreeMap<Partition, Rational> = BTreeMap::new();
    let mut guard = 0usize;
    while let Some((lead, coeff)) = rem.leading() {
        guard += 1;
        assert!(guard < 200_000, "monomial reduction did not terminate");
        let coeff = coeff.clone();
        let pi = Partition::new(lead.clone());
        rem.sub_assign(&m_poly(&pi, f.nvars).scale(&coeff));
        *out.entry(pi).or_insert_with(|| q(0)) += coeff;
        out.retain(|_, c| !c.is_zero());
    }
    out
}

/// A symmetric function stored in a named basis.
#[derive(Clone, PartialEq, Debug)]
pub enum SymFun {
    /// Combination of monomial symmetric functions.
    Monomial(BTreeMap<Partition, Rational>),
    /// Combination of products of elementary symmetric functions.
    Elementary(EPoly),
}

impl SymFun {
    pub fn expand(&self, n: usize) -> SymPoly {
        match self {
            SymFun::Monomial(terms) => {
                let mut out = SymPoly::zero(n);
                for (pi, c) in terms {
                    out.add_assign(&m_poly(pi, n).scale(c));
                }
                out
            }
            SymFun::Elementary(ep) => expand_e(ep, n),
        }
    }

    pub fn to_elementary(&self, n: usize) -> EPoly {
        sym_to_elementary(&self.expand(n))
    }

    pub fn to_monomial(&self, n: usize) -> BTreeMap<Partition, Rational> {
        sym_to_monomial(&self.expand(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e_key(n: usize, r: usize) -> Vec<u16> {
        let mut v = vec![0u16; n];
        v[r - 1] = 1;
        v
    }

    #[test]
    fn m_ones_is_elementary() {
        for r in 1..=4u16 {
            let n = 5;
            let f = m_poly(&Partition::ones(r), n);
            let ep = sym_to_elementary(&f);
            assert_eq!(ep.len(), 1);
            assert_eq!(ep.get(&e_key(n, r as usize)), Some(&q(1)));
        }
    }

    #[test]
    fn newton_p2() {
        // p_2 = e_1^2 - 2 e_2 in 3 variables
        let n = 3;
        let ep = sym_to_elementary(&p_poly(2, n));
        let mut e1sq = vec![0u16; n];
        e1sq[0] = 2;
        assert_eq!(ep.get(&e1sq), Some(&q(1)));
        assert_eq!(ep.get(&e_key(n, 2)), Some(&q(-2)));
        assert_eq!(ep.len(), 2);
    }

    #[test]
    fn m21_in_three_vars() {
        // Independent route: brute-force expansion in 3 variables, linear
        // reduction to the e-basis. Expect m_(2,1) = e_1 e_2 - 3 e_3.
        let n = 3;
        let f = m_poly(&Partition::new(vec![2, 1]), n);
        let ep = sym_to_elementary(&f);
        let mut e1e2 = vec![0u16; n];
        e1e2[0] = 1;
        e1e2[1] = 1;
        assert_eq!(ep.get(&e1e2), Some(&q(1)));
        assert_eq!(ep.get(&e_key(n, 3)), Some(&q(-3)));
        assert_eq!(ep.len(), 2);
    }

    #[test]
    fn round_trips() {
        // m -> e -> expanded polynomial is the identity for all partitions of
        // size <= 8 in <= 8 variables (well below that here for speed at the
        // unit level; the full sweep runs in the integration suite).
        for n in 2..=5usize {
            for pi in partitions_of(6) {
                if pi.length() > n {
                    continue;
                }
                let f = m_poly(&pi, n);
                let ep = sym_to_elementary(&f);
                assert_eq!(expand_e(&ep, n), f, "partition {pi} in {n} vars");
                let mono = sym_to_monomial(&f);
                assert_eq!(mono.len(), 1);
                assert_eq!(mono.get(&pi), Some(&q(1)));
            }
        }
    }

    #[test]
    fn symfun_wrapper_round_trip() {
        let mut terms = BTreeMap::new();
        terms.insert(Partition::new(vec![2, 1]), q(3));
        terms.insert(Partition::ones(3), q(-1));
        let f = SymFun::Monomial(terms);
        let n = 4;
        let e = SymFun::Elementary(f.to_elementary(n));
        assert_eq!(e.expand(n), f.expand(n));
        assert_eq!(SymFun::Elementary(f.to_elementary(n)).to_monomial(n), f.to_monomial(n));
    }

    pub fn partitions_of(size: u16) -> Vec<Partition> {
        fn rec(rest: u16, max: u16, cur: &mut Vec<u16>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition::new(cur.clone()));
                return;
            }
            for p in (1..=rest.min(max)).rev() {
                cur.push(p);
                rec(rest - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(size, size, &mut Vec::new(), &mut out);
        out
    }
}
