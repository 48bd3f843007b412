//! The rank-`n` Heisenberg vertex algebra on its Fock space.
//!
//! Mode convention: `I_i(z) = sum_p I_{i,(p)} z^{-p-1}` with
//! `[I_{i,(p)}, I_{j,(q)}] = p hbar d_{ij} d_{p+q,0}` and `I_{i,(p)}|0> = 0`
//! for `p >= 0`. States are spanned by sorted creation words applied to the
//! vacuum; the field of the state `a_{i,-m}|0>` is `d^(m-1) I_i / (m-1)!`,
//! and normally ordered products are reconstructed right-nested from the
//! sorted word. Integer-indexed products `a_(s) b` are computed by direct
//! mode distribution, which is finite because annihilation depth is bounded
//! by the weight of `b`.

use crate::coeff::{binom_general, MultiPoly, Rational, Var};
use num::traits::Zero;
use num::BigInt;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FockError {
    #[error("generator index {index} out of range 1..={rank}")]
    GeneratorOutOfRange { index: u16, rank: u16 },
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(u16, u16),
}

/// A creation word: sorted multiset of `(generator, mode magnitude)` pairs,
/// `(i, m)` standing for the creation mode `I_{i,(-m)}`. The empty word is the
/// vacuum.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct FockMono(Vec<(u16, u16)>);

impl FockMono {
    pub fn vacuum() -> Self {
        FockMono(Vec::new())
    }

    pub fn from_modes(mut modes: Vec<(u16, u16)>) -> Self {
        modes.sort_unstable();
        FockMono(modes)
    }

    pub fn modes(&self) -> &[(u16, u16)] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().map(|&(_, m)| m as u32).sum()
    }

    pub fn is_vacuum(&self) -> bool {
        self.0.is_empty()
    }

    pub fn insert(&self, i: u16, m: u16) -> FockMono {
        let mut v = self.0.clone();
        let pos = v.partition_point(|&p| p < (i, m));
        v.insert(pos, (i, m));
        FockMono(v)
    }

    /// Multiset union.
    pub fn union(&self, other: &FockMono) -> FockMono {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        v.sort_unstable();
        FockMono(v)
    }

    /// Number of occurrences of `(i, m)` and the word with one removed.
    fn remove_one(&self, i: u16, m: u16) -> Option<(usize, FockMono)> {
        let count = self.0.iter().filter(|&&p| p == (i, m)).count();
        if count == 0 {
            return None;
        }
        let pos = self.0.iter().position(|&p| p == (i, m)).unwrap();
        let mut v = self.0.clone();
        v.remove(pos);
        Some((count, FockMono(v)))
    }

    /// Shifts every generator index by `offset`.
    pub fn shift_generators(&self, offset: u16) -> FockMono {
        FockMono(self.0.iter().map(|&(i, m)| (i + offset, m)).collect())
    }

    /// Largest generator index used (0 for the vacuum).
    pub fn max_generator(&self) -> u16 {
        self.0.iter().map(|&(i, _)| i).max().unwrap_or(0)
    }

    /// True when every mode magnitude is 1 (no derivative modes).
    pub fn is_derivative_free(&self) -> bool {
        self.0.iter().all(|&(_, m)| m == 1)
    }
}

impl fmt::Display for FockMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(i, m) in self.0.iter().rev() {
            write!(f, "I{}(-{}) ", i, m)?;
        }
        write!(f, "|0>")
    }
}

/// A finite linear combination of creation words with polynomial
/// coefficients (in practice polynomials in `hbar`).
#[derive(Clone, PartialEq, Debug)]
pub struct FockVector {
    rank: u16,
    terms: BTreeMap<FockMono, MultiPoly>,
}

impl FockVector {
    pub fn zero(rank: u16) -> Self {
        FockVector {
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn vacuum(rank: u16) -> Self {
        Self::monomial(rank, FockMono::vacuum(), MultiPoly::one())
    }

    pub fn monomial(rank: u16, mono: FockMono, coeff: MultiPoly) -> Self {
        debug_assert!(mono.max_generator() <= rank);
        let mut v = Self::zero(rank);
        v.add_term(mono, coeff);
        v
    }

    pub fn rank(&self) -> u16 {
        self.rank
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FockMono, &MultiPoly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff_of(&self, m: &FockMono) -> MultiPoly {
        self.terms.get(m).cloned().unwrap_or_else(MultiPoly::zero)
    }

    pub fn add_term(&mut self, m: FockMono, c: MultiPoly) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                e.get_mut().add_assign(&c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &FockVector) {
        debug_assert_eq!(self.rank, other.rank);
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn sub_assign(&mut self, other: &FockVector) {
        debug_assert_eq!(self.rank, other.rank);
        for (m, c) in &other.terms {
            self.add_term(m.clone(), -c);
        }
    }

    pub fn add(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        out.sub_assign(other);
        out
    }

    pub fn neg(&self) -> FockVector {
        FockVector {
            rank: self.rank,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &MultiPoly) -> FockVector {
        if c.is_zero() {
            return FockVector::zero(self.rank);
        }
        let mut out = FockVector::zero(self.rank);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    pub fn scale_rat(&self, c: &Rational) -> FockVector {
        self.scale(&MultiPoly::constant(c.clone()))
    }

    /// Maximal weight among the words (0 for the zero vector).
    pub fn max_weight(&self) -> u32 {
        self.terms.keys().map(|m| m.weight()).max().unwrap_or(0)
    }

    /// Weight of a homogeneous vector.
    pub fn weight(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.weight());
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    /// Projection on the conformal-weight-zero subspace: the coefficient of
    /// the vacuum.
    pub fn weight_zero_part(&self) -> MultiPoly {
        self.coeff_of(&FockMono::vacuum())
    }

    /// Projection onto words of the given weight.
    pub fn weight_part(&self, w: u32) -> FockVector {
        FockVector {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.weight() == w)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Reinterprets the vector in a larger rank (words are unchanged).
    pub fn with_rank(&self, rank: u16) -> FockVector {
        assert!(rank >= self.terms.keys().map(|m| m.max_generator()).max().unwrap_or(0));
        FockVector {
            rank,
            terms: self.terms.clone(),
        }
    }

    /// Shifts all generator indices (embedding onto a disjoint boson block).
    pub fn shift_generators(&self, offset: u16, rank: u16) -> FockVector {
        let mut out = FockVector::zero(rank);
        for (m, c) in &self.terms {
            out.add_term(m.shift_generators(offset), c.clone());
        }
        out
    }

    /// Product of two vectors supported on disjoint generator sets: words
    /// merge with no contractions.
    pub fn mul_disjoint(&self, other: &FockVector) -> FockVector {
        debug_assert_eq!(self.rank, other.rank);
        let mut out = FockVector::zero(self.rank);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                debug_assert!(
                    m1.modes().iter().all(|(i, _)| m2.modes().iter().all(|(j, _)| i != j)),
                    "mul_disjoint requires disjoint generator supports"
                );
                out.add_term(m1.union(m2), c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for FockVector {
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
            if c.is_one() {
                write!(f, "{}", m)?;
            } else if c.num_terms() <= 1 {
                write!(f, "{} {}", c, m)?;
            } else {
                write!(f, "({}) {}", c, m)?;
            }
        }
        Ok(())
    }
}

fn hbar() -> MultiPoly {
    MultiPoly::var(Var::Hbar)
}

/// Applies the mode `I_{i,(p)}` to a vector.
///
/// Creation (`p < 0`) inserts into the word; `p = 0` annihilates everything;
/// annihilation (`p > 0`) contracts against matching creation modes, each
/// contraction contributing one factor of `hbar`.
pub fn mode_apply(i: u16, p: i32, v: &FockVector) -> Result<FockVector, FockError> {
    if i == 0 || i > v.rank {
        return Err(FockError::GeneratorOutOfRange {
            index: i,
            rank: v.rank,
        });
    }
    let mut out = FockVector::zero(v.rank);
    if p == 0 {
        return Ok(out);
    }
    if p < 0 {
        let m = (-p) as u16;
        for (word, c) in &v.terms {
            out.add_term(word.insert(i, m), c.clone());
        }
        return Ok(out);
    }
    let m = p as u16;
    for (word, c) in &v.terms {
        if let Some((count, reduced)) = word.remove_one(i, m) {
            let factor = hbar().scale(&crate::coeff::q(p as i64 * count as i64));
            out.add_term(reduced, c * &factor);
        }
    }
    Ok(out)
}

/// Mode coefficient of the derivative field: the `(p)` mode of
/// `d^(m-1) I / (m-1)!` is `(-1)^(m-1) binom(p, m-1) I_(p-m+1)`.
fn derived_mode_coeff(p: i64, m: u16) -> Rational {
    let k = (m - 1) as u32;
    let mut b: BigInt = binom_general(p, k);
    if k % 2 == 1 {
        b = -b;
    }
    Rational::from(b)
}

/// The integer-indexed product `a_(s) b`.
pub fn nth_product(a: &FockVector, s: i32, b: &FockVector) -> Result<FockVector, FockError> {
    if a.rank != b.rank {
        return Err(FockError::RankMismatch(a.rank, b.rank));
    }
    let mut out = FockVector::zero(a.rank);
    for (word, coeff) in &a.terms {
        let contribution = apply_word(word.modes(), s, b);
        out.add_assign(&contribution.scale(coeff));
    }
    Ok(out)
}

/// Applies the `s`-mode of the right-nested normally ordered field of a
/// creation word to `b`.
///
/// For the word `f rest` (sorted), uses the normal-product mode expansion
/// `(f_(-1) rest)_(s) = sum_{p<=-1} f_(p) rest_(s-p-1)
///                    + sum_{p>=0} rest_(s-p-1) f_(p)`.
fn apply_word(word: &[(u16, u16)], s: i32, b: &FockVector) -> FockVector {
    if word.is_empty() {
        return if s == -1 {
            b.clone()
        } else {
            FockVector::zero(b.rank)
        };
    }
    let word_weight: i64 = word.iter().map(|&(_, m)| m as i64).sum();
    let target = word_weight + b.max_weight() as i64 - s as i64 - 1;
    if target < 0 || b.is_zero() {
        return FockVector::zero(b.rank);
    }
    let (i, m) = word[0];
    let rest = &word[1..];
    let rest_weight: i64 = rest.iter().map(|&(_, mm)| mm as i64).sum();
    let mut out = FockVector::zero(b.rank);

    // Creation part: p <= -1, inner mode s' = s - p - 1 ranges over
    // s <= s' <= rest_weight + wt(b) - 1 (beyond that the inner call is zero).
    let s_max = rest_weight + b.max_weight() as i64 - 1;
    let mut sp = s as i64;
    while sp <= s_max {
        let p = s as i64 - sp - 1; // <= -1
        let inner = apply_word(rest, sp as i32, b);
        if !inner.is_zero() {
            let c = derived_mode_coeff(p, m);
            if !c.is_zero() {
                let created = mode_apply(i, (p - (m as i64 - 1)) as i32, &inner)
                    .expect("index checked")
                    .scale_rat(&c);
                out.add_assign(&created);
            }
        }
        sp += 1;
    }

    // Annihilation part: p >= m (the zero mode p = m-1 kills everything).
    for p in (m as i64)..=(b.max_weight() as i64 + m as i64 - 1) {
        let c = derived_mode_coeff(p, m);
        if c.is_zero() {
            continue;
        }
        let hit = mode_apply(i, (p - (m as i64 - 1)) as i32, b).expect("index checked");
        if hit.is_zero() {
            continue;
        }
        let inner = apply_word(rest, (s as i64 - p - 1) as i32, &hit);
        out.add_assign(&inner.scale_rat(&c));
    }
    out
}

/// The translation operator `T`: acts on a word by the Leibniz rule, sending
/// one `(i, m)` factor to `m (i, m+1)` at a time. `T(vacuum) = 0`.
pub fn translate(v: &FockVector) -> FockVector {
    let mut out = FockVector::zero(v.rank);
    for (word, coeff) in &v.terms {
        let modes = word.modes();
        let mut idx = 0;
        while idx < modes.len() {
            let (i, m) = modes[idx];
            // count the run of identical modes to apply multiplicity once
            let run = modes[idx..].iter().take_while(|&&p| p == (i, m)).count();
            let (_, reduced) = word.remove_one(i, m).expect("present");
            let bumped = reduced.insert(i, m + 1);
            out.add_term(bumped, coeff.scale(&crate::coeff::q(m as i64 * run as i64)));
            idx += run;
        }
    }
    out
}

pub fn translate_n(v: &FockVector, d: u32) -> FockVector {
    let mut acc = v.clone();
    for _ in 0..d {
        acc = translate(&acc);
    }
    acc
}

/// Deterministic pseudo-random low-weight vectors for property checks.
pub fn sample_vector(rank: u16, max_weight: u32, rng: &mut impl rand::Rng) -> FockVector {
    use rand::seq::SliceRandom;
    let mut out = FockVector::zero(rank);
    let n_terms = rng.gen_range(1..=3);
    for _ in 0..n_terms {
        let mut word = Vec::new();
        let mut budget = rng.gen_range(0..=max_weight);
        while budget > 0 {
            let m = rng.gen_range(1..=budget.min(3)) as u16;
            let i = *(1..=rank).collect::<Vec<_>>().choose(rng).unwrap();
            word.push((i, m));
            budget -= m as u32;
        }
        let c = crate::coeff::q(rng.gen_range(-3..=3));
        out.add_term(
            FockMono::from_modes(word),
            MultiPoly::constant(c),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::q;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn word(modes: &[(u16, u16)]) -> FockMono {
        FockMono::from_modes(modes.to_vec())
    }

    fn state(rank: u16, modes: &[(u16, u16)]) -> FockVector {
        FockVector::monomial(rank, word(modes), MultiPoly::one())
    }

    #[test]
    fn mode_examples() {
        let v = state(2, &[(1, 1)]);
        // I_{1,(1)} a_{1,-1}|0> = hbar |0>
        let hit = mode_apply(1, 1, &v).unwrap();
        assert_eq!(hit, FockVector::monomial(2, FockMono::vacuum(), hbar()));
        // zero mode annihilates
        assert!(mode_apply(1, 0, &v).unwrap().is_zero());
        // distinct generators commute and annihilate the vacuum
        assert!(mode_apply(2, 3, &v).unwrap().is_zero());
        // out-of-range generator rejected
        assert!(mode_apply(3, 1, &v).is_err());
    }

    #[test]
    fn nth_product_central_term() {
        let a = state(1, &[(1, 1)]);
        let got = nth_product(&a, 1, &a).unwrap();
        assert_eq!(got, FockVector::monomial(1, FockMono::vacuum(), hbar()));
    }

    #[test]
    fn nth_product_minus_one_is_normal_order_on_vacuum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = sample_vector(3, 4, &mut rng);
            let got = nth_product(&a, -1, &FockVector::vacuum(3)).unwrap();
            assert_eq!(got, a);
        }
    }

    #[test]
    fn double_contraction() {
        // a = a_{1,-1} a_{2,-1}|0>, s = 3, against itself: hbar^2 |0>
        let a = state(2, &[(1, 1), (2, 1)]);
        let got = nth_product(&a, 3, &a).unwrap();
        assert_eq!(
            got,
            FockVector::monomial(2, FockMono::vacuum(), &hbar() * &hbar())
        );
    }

    #[test]
    fn vacuum_axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let omega = FockVector::vacuum(3);
        for _ in 0..10 {
            let a = sample_vector(3, 4, &mut rng);
            for s in -3..=3 {
                let lhs = nth_product(&omega, s, &a).unwrap();
                if s == -1 {
                    assert_eq!(lhs, a);
                } else {
                    assert!(lhs.is_zero());
                }
                if s >= 0 {
                    assert!(nth_product(&a, s, &omega).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn translation_examples() {
        assert!(translate(&FockVector::vacuum(2)).is_zero());
        let v = state(2, &[(1, 1)]);
        assert_eq!(translate(&v), state(2, &[(1, 2)]));
    }

    #[test]
    fn translation_covariance() {
        // (Ta)_(s) b = -s a_(s-1) b
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..8 {
            let a = sample_vector(2, 3, &mut rng);
            let b = sample_vector(2, 3, &mut rng);
            for s in -3..=4 {
                let lhs = nth_product(&translate(&a), s, &b).unwrap();
                let rhs = nth_product(&a, s - 1, &b).unwrap().scale_rat(&q(-s as i64));
                assert_eq!(lhs, rhs, "s = {s}");
            }
        }
    }

    #[test]
    fn grading() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..8 {
            // project samples to homogeneous parts
            let a0 = sample_vector(3, 4, &mut rng);
            let b0 = sample_vector(3, 4, &mut rng);
            let a = a0.weight_part(a0.max_weight());
            let b = b0.weight_part(b0.max_weight());
            let (wa, wb) = (a.max_weight(), b.max_weight());
            for s in -2..=5 {
                let p = nth_product(&a, s, &b).unwrap();
                if p.is_zero() {
                    continue;
                }
                let w = p.weight().expect("product of homogeneous is homogeneous");
                assert_eq!(w as i64, wa as i64 + wb as i64 - s as i64 - 1);
            }
        }
    }

    #[test]
    fn commutator_formula() {
        // [a_(p), b_(q)] c = sum_j binom(p, j) (a_(j) b)_(p+q-j) c
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..5 {
            let a = sample_vector(2, 3, &mut rng);
            let b = sample_vector(2, 3, &mut rng);
            let c = sample_vector(2, 2, &mut rng);
            for p in -3..=3i32 {
                for q_ in -3..=3i32 {
                    let lhs = nth_product(&a, p, &nth_product(&b, q_, &c).unwrap())
                        .unwrap()
                        .sub(&nth_product(&b, q_, &nth_product(&a, p, &c).unwrap()).unwrap());
                    let mut rhs = FockVector::zero(2);
                    let j_max = (a.max_weight() + b.max_weight()) as i32 + 2;
                    for j in 0..=j_max {
                        let coeff = Rational::from(binom_general(p as i64, j as u32));
                        if coeff == q(0) {
                            continue;
                        }
                        let inner = nth_product(&a, j, &b).unwrap();
                        rhs.add_assign(
                            &nth_product(&inner, p + q_ - j, &c)
                                .unwrap()
                                .scale_rat(&coeff),
                        );
                    }
                    assert_eq!(lhs, rhs, "p={p} q={q_}");
                }
            }
        }
    }

    #[test]
    fn hbar_homogeneity() {
        // every contraction contributes exactly one hbar: coefficients of the
        // s >= 0 products have no hbar-free part
        let a = state(2, &[(1, 1), (2, 1)]);
        let b = state(2, &[(1, 1), (1, 2)]);
        for s in 0..=3 {
            let p = nth_product(&a, s, &b).unwrap();
            for (_, c) in p.terms() {
                assert!(c.coeff_in_var(Var::Hbar, 0).is_zero());
            }
        }
    }

    #[test]
    fn rank_mismatch_is_rejected() {
        let a = state(2, &[(1, 1)]);
        let b = state(3, &[(1, 1)]);
        assert!(matches!(
            nth_product(&a, 0, &b),
            Err(FockError::RankMismatch(2, 3))
        ));
    }

    #[test]
    fn weight_zero_projection() {
        let mut v = FockVector::monomial(2, FockMono::vacuum(), &hbar() * &hbar());
        v.add_term(word(&[(1, 1)]), MultiPoly::one());
        assert_eq!(v.weight_zero_part(), &hbar() * &hbar());
        let positive = state(2, &[(1, 2), (2, 1)]);
        assert!(positive.weight_zero_part().is_zero());
    }

    #[test]
    fn rendering() {
        let v = state(3, &[(3, 1), (1, 2)]);
        assert_eq!(v.to_string(), "I3(-1) I1(-2) |0>");
    }
}
