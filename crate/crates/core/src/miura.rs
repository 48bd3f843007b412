//! The quantum Miura transform: the fields `U_j` realized inside the rank-`n`
//! Fock space, the PBW basis of the generated W-subalgebra, and exact
//! rewriting of products into that basis.
//!
//! Two constructions of the fields are implemented and cross-checked: the
//! closed form with products of binomial coefficients, and the recursive
//! expansion of `(d + I_1(z)) ... (d + I_n(z))` in powers of `d`. Rewriting
//! solves the tall linear system whose columns are the Fock coordinates of
//! the PBW monomials, layer by layer in `hbar` against the contraction-free
//! slice, and verifies the residual exactly.

use crate::coeff::{binom_nonneg, q, MultiPoly, RatFunc, Rational, Var};
use crate::fock::{nth_product, translate_n, FockError, FockMono, FockVector};
use crate::linalg::{LayeredSystem, LinalgError, SparseCols};
use itertools::Itertools;
use num::traits::Zero;
use num::BigInt;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MiuraError {
    #[error("field U_{j} does not exist at rank {n}")]
    FieldOutOfRange { j: u16, n: u16 },
    #[error("basis at rank {n} requires generators up to weight {w}; got none")]
    EmptyBasis { n: u16, w: u32 },
    #[error("closure failure rewriting a weight-{w} vector at rank {n}: {detail}")]
    ClosureFailure { n: u16, w: u32, detail: String },
    #[error("vector mixes weights; rewriting expects homogeneous input")]
    NotHomogeneous,
    #[error("rewrite produced a non-polynomial coefficient at {0}")]
    NonPolynomialSolution(String),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Product of binomials attached to a strictly increasing index tuple and
/// derivative multiplicities:
/// `prod_t binom(i_t - t - m_1 - ... - m_(t-1), m_t)`.
pub fn miura_coefficient(indices: &[u16], ders: &[u16]) -> BigInt {
    assert_eq!(indices.len(), ders.len());
    assert!(!indices.is_empty());
    let mut acc = BigInt::from(1);
    let mut used: i64 = 0;
    for (t, (&i, &m)) in indices.iter().zip(ders.iter()).enumerate() {
        let upper = i as i64 - (t as i64 + 1) - used;
        acc *= binom_nonneg(upper, m as u32);
        if acc.is_zero() {
            return acc;
        }
        used += m as i64;
    }
    acc
}

/// The field `U_j` at rank `n`, closed form: the sum over strictly increasing
/// index tuples and derivative multiplicities with `len + sum(m) = j` of
/// `c * I_{i_1}^(m_1) ... I_{i_a}^(m_a)`, as a weight-`j` state.
pub fn miura_field(n: u16, j: u16) -> Result<FockVector, MiuraError> {
    if j == 0 || j > n {
        return Err(MiuraError::FieldOutOfRange { j, n });
    }
    let mut out = FockVector::zero(n);
    for a in 1..=j {
        let der_total = (j - a) as u32;
        for indices in (1..=n).combinations(a as usize) {
            for ders in compositions(der_total, a as usize) {
                let c = miura_coefficient(&indices, &ders);
                if c.is_zero() {
                    continue;
                }
                // state of I^(m) is m! * a_{-m-1}
                let mut factor = Rational::from(c);
                let word: Vec<(u16, u16)> = indices
                    .iter()
                    .zip(ders.iter())
                    .map(|(&i, &m)| {
                        for t in 1..=m as i64 {
                            factor *= q(t);
                        }
                        (i, m + 1)
                    })
                    .collect();
                out.add_term(
                    FockMono::from_modes(word),
                    MultiPoly::constant(factor),
                );
            }
        }
    }
    Ok(out)
}

/// All compositions of `total` into `parts` nonnegative parts.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u16>> {
    fn rec(total: u32, parts: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if parts == 1 {
            cur.push(total as u16);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for head in 0..=total {
            cur.push(head as u16);
            rec(total - head, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, &mut Vec::new(), &mut out);
    out
}

/// The same field from the recursive operator expansion: coefficients of
/// `(d + I_1) ... (d + I_n)` in powers of `d`, taken at `d^(n-j)`.
pub fn miura_field_recursive(n: u16, j: u16) -> Result<FockVector, MiuraError> {
    if j == 0 || j > n {
        return Err(MiuraError::FieldOutOfRange { j, n });
    }
    // coeffs[d] multiplies d^d; start from the identity operator.
    let mut coeffs: Vec<FockVector> = vec![FockVector::vacuum(n)];
    for k in (1..=n).rev() {
        let mut next: Vec<FockVector> = vec![FockVector::zero(n); coeffs.len() + 1];
        for (d, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // d * c d^d = (Tc) d^d + c d^(d+1)
            next[d].add_assign(&crate::fock::translate(c));
            next[d + 1].add_assign(c);
            // I_k * c d^d (left multiplication by a fresh generator)
            next[d].add_assign(&crate::fock::mode_apply(k, -1, c)?);
        }
        coeffs = next;
    }
    Ok(coeffs[(n - j) as usize].clone())
}

/// A PBW monomial in the generators `U_j^(d)`, sorted canonically.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct UMono(Vec<(u16, u16, u16)>);

impl UMono {
    pub fn unit() -> Self {
        UMono(Vec::new())
    }

    pub fn gen(j: u16, d: u16) -> Self {
        UMono(vec![(j, d, 1)])
    }

    pub fn from_factors(mut v: Vec<(u16, u16, u16)>) -> Self {
        v.retain(|&(_, _, m)| m > 0);
        v.sort_unstable();
        let mut merged: Vec<(u16, u16, u16)> = Vec::new();
        for (j, d, m) in v {
            match merged.last_mut() {
                Some((lj, ld, lm)) if *lj == j && *ld == d => *lm += m,
                _ => merged.push((j, d, m)),
            }
        }
        UMono(merged)
    }

    pub fn factors(&self) -> &[(u16, u16, u16)] {
        &self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.0
            .iter()
            .map(|&(j, d, m)| (j as u32 + d as u32) * m as u32)
            .sum()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, _, m)| m as u32).sum()
    }

    pub fn mul(&self, other: &UMono) -> UMono {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        UMono::from_factors(v)
    }

    pub fn has_derivatives(&self) -> bool {
        self.0.iter().any(|&(_, d, _)| d > 0)
    }

    /// Expanded factor list with multiplicity, canonical order.
    pub fn expanded(&self) -> Vec<(u16, u16)> {
        let mut out = Vec::new();
        for &(j, d, m) in &self.0 {
            for _ in 0..m {
                out.push((j, d));
            }
        }
        out
    }
}

impl fmt::Display for UMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .rev()
            .map(|&(j, d, m)| {
                let base = if d == 0 {
                    format!("U_{}", j)
                } else {
                    format!("U_{}^({})", j, d)
                };
                if m == 1 {
                    base
                } else {
                    format!("{}^{}", base, m)
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// A linear combination of PBW monomials.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct UVector {
    terms: BTreeMap<UMono, RatFunc>,
}

impl UVector {
    pub fn zero() -> Self {
        UVector {
            terms: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn monomial(m: UMono, c: RatFunc) -> Self {
        let mut v = Self::zero();
        v.add_term(m, c);
        v
    }

    pub fn terms(&self) -> impl Iterator<Item = (&UMono, &RatFunc)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff_of(&self, m: &UMono) -> RatFunc {
        self.terms.get(m).cloned().unwrap_or_else(RatFunc::zero)
    }

    pub fn add_term(&mut self, m: UMono, c: RatFunc) {
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

    pub fn add_assign(&mut self, other: &UVector) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn sub_assign(&mut self, other: &UVector) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), -c);
        }
    }

    pub fn scale(&self, c: &RatFunc) -> UVector {
        if c.is_zero() {
            return UVector::zero();
        }
        let mut out = UVector::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    pub fn map_coeffs<F: Fn(&RatFunc) -> RatFunc>(&self, f: F) -> UVector {
        let mut out = UVector::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn weight(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.weight());
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    /// Substitutes an integer rank for `nu` in every coefficient.
    pub fn eval_nu(&self, n: i64) -> Result<UVector, crate::coeff::CoeffError> {
        let mut out = UVector::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.eval_var(Var::Nu, &q(n))?);
        }
        Ok(out)
    }
}

impl fmt::Display for UVector {
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
            } else {
                write!(f, "({})*{}", c, m)?;
            }
        }
        Ok(())
    }
}

/// All PBW monomials of the given weight, generators limited to index `<= n`.
pub fn umonos_of_weight(w: u32, n: u16) -> Vec<UMono> {
    // Generators ordered by (weight, j); enumerate multisets recursively.
    let mut gens: Vec<(u16, u16)> = Vec::new();
    for wt in 1..=w {
        for j in 1..=wt.min(n as u32) as u16 {
            gens.push((j, wt as u16 - j));
        }
    }
    let mut out = Vec::new();
    fn rec(
        gens: &[(u16, u16)],
        idx: usize,
        remaining: u32,
        cur: &mut Vec<(u16, u16, u16)>,
        out: &mut Vec<UMono>,
    ) {
        if remaining == 0 {
            out.push(UMono::from_factors(cur.clone()));
            return;
        }
        if idx >= gens.len() {
            return;
        }
        let (j, d) = gens[idx];
        let gw = j as u32 + d as u32;
        let max_mult = remaining / gw;
        for m in (0..=max_mult).rev() {
            if m > 0 {
                cur.push((j, d, m as u16));
            }
            rec(gens, idx + 1, remaining - m * gw, cur, out);
            if m > 0 {
                cur.pop();
            }
        }
    }
    rec(&gens, 0, w, &mut Vec::new(), &mut out);
    out.sort();
    out.dedup();
    out
}

/// Caches the Miura fields and their derivatives at one rank.
pub struct FieldCache {
    n: u16,
    fields: BTreeMap<(u16, u16), Arc<FockVector>>,
}

impl FieldCache {
    pub fn new(n: u16) -> Self {
        FieldCache {
            n,
            fields: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> u16 {
        self.n
    }

    pub fn field(&mut self, j: u16, d: u16) -> Result<Arc<FockVector>, MiuraError> {
        if let Some(v) = self.fields.get(&(j, d)) {
            return Ok(v.clone());
        }
        let base = if d == 0 {
            miura_field(self.n, j)?
        } else {
            translate_n(self.field(j, 0)?.as_ref(), d as u32)
        };
        let arc = Arc::new(base);
        self.fields.insert((j, d), arc.clone());
        Ok(arc)
    }

    /// Fock realization of a PBW monomial: right-nested normally ordered
    /// product of the generator fields in canonical order.
    pub fn realize(&mut self, mono: &UMono) -> Result<FockVector, MiuraError> {
        let factors = mono.expanded();
        if factors.is_empty() {
            return Ok(FockVector::vacuum(self.n));
        }
        let mut state = self.field(factors.last().unwrap().0, factors.last().unwrap().1)?
            .as_ref()
            .clone();
        for &(j, d) in factors.iter().rev().skip(1) {
            let left = self.field(j, d)?;
            state = nth_product(&left, -1, &state)?;
        }
        Ok(state)
    }

    /// Fock realization of a whole UVector at integer rank (coefficients must
    /// specialize to polynomials in `hbar`).
    pub fn realize_uvector(&mut self, v: &UVector) -> Result<FockVector, MiuraError> {
        let mut out = FockVector::zero(self.n);
        for (mono, coeff) in v.terms() {
            let poly = coeff
                .as_poly()
                .cloned()
                .ok_or_else(|| MiuraError::NonPolynomialSolution(coeff.to_string()))?;
            out.add_assign(&self.realize(mono)?.scale(&poly));
        }
        Ok(out)
    }
}

/// The rewriting system at one `(rank, weight)`: the PBW basis, its Fock
/// realizations, and the layered solver.
pub struct RewriteContext {
    pub n: u16,
    pub w: u32,
    pub basis: Vec<UMono>,
    pub realizations: Vec<FockVector>,
    row_index: BTreeMap<FockMono, usize>,
    system: LayeredSystem,
    max_hbar_degree: usize,
}

impl RewriteContext {
    pub fn new(n: u16, w: u32) -> Result<Self, MiuraError> {
        let mut cache = FieldCache::new(n);
        Self::with_cache(&mut cache, w)
    }

    pub fn with_cache(cache: &mut FieldCache, w: u32) -> Result<Self, MiuraError> {
        let n = cache.rank();
        let basis = umonos_of_weight(w, n);
        if basis.is_empty() && w > 0 {
            return Err(MiuraError::EmptyBasis { n, w });
        }
        let realizations: Vec<FockVector> = basis
            .iter()
            .map(|m| cache.realize(m))
            .collect::<Result<_, _>>()?;
        let mut row_index: BTreeMap<FockMono, usize> = BTreeMap::new();
        for r in &realizations {
            for (mono, _) in r.terms() {
                let next = row_index.len();
                row_index.entry(mono.clone()).or_insert(next);
            }
        }
        let nrows = row_index.len();
        let mut max_deg = 0usize;
        for r in &realizations {
            for (_, c) in r.terms() {
                max_deg = max_deg.max(c.degree_in(Var::Hbar) as usize);
            }
        }
        let mut slices: Vec<SparseCols> =
            (0..=max_deg).map(|_| SparseCols::new(nrows, basis.len())).collect();
        for (col, r) in realizations.iter().enumerate() {
            for (mono, c) in r.terms() {
                let row = row_index[mono];
                for (k, part) in c.slices_in_var(Var::Hbar).into_iter().enumerate() {
                    if let Some(value) = part.as_constant() {
                        if !value.is_zero() {
                            slices[k].push_entry(row, col, value);
                        }
                    } else {
                        panic!("realization coefficient is not a polynomial in hbar alone");
                    }
                }
            }
        }
        let system = LayeredSystem::new(slices)?;
        Ok(RewriteContext {
            n,
            w,
            basis,
            realizations,
            row_index,
            system,
            max_hbar_degree: max_deg,
        })
    }

    pub fn hbar_degree(&self) -> usize {
        self.max_hbar_degree
    }

    /// Expresses a homogeneous weight-`w` vector in the PBW basis, exactly.
    pub fn rewrite(&self, v: &FockVector) -> Result<UVector, MiuraError> {
        if v.is_zero() {
            return Ok(UVector::zero());
        }
        // Slice the target by hbar degree over the row set.
        let mut rhs: Vec<Vec<Rational>> = Vec::new();
        for (mono, c) in v.terms() {
            if mono.weight() != self.w {
                return Err(MiuraError::NotHomogeneous);
            }
            let Some(&row) = self.row_index.get(mono) else {
                return Err(MiuraError::ClosureFailure {
                    n: self.n,
                    w: self.w,
                    detail: format!("word {mono} lies outside the span of the PBW realizations"),
                });
            };
            for (k, part) in c.slices_in_var(Var::Hbar).into_iter().enumerate() {
                let value = part.as_constant().expect("hbar-only coefficients");
                if value.is_zero() {
                    continue;
                }
                while rhs.len() <= k {
                    rhs.push(vec![q(0); self.row_index.len()]);
                }
                rhs[k][row] = value;
            }
        }
        let x_layers = self.system.solve(&rhs).map_err(|e| match e {
            LinalgError::Inconsistent(d) | LinalgError::RankDeficient(d) => {
                MiuraError::ClosureFailure {
                    n: self.n,
                    w: self.w,
                    detail: d,
                }
            }
            LinalgError::NoTermination(k) => MiuraError::ClosureFailure {
                n: self.n,
                w: self.w,
                detail: format!("no polynomial solution within {k} layers"),
            },
        })?;
        let mut out = UVector::zero();
        for (col, mono) in self.basis.iter().enumerate() {
            let mut poly = MultiPoly::zero();
            for (k, layer) in x_layers.iter().enumerate() {
                if !layer[col].is_zero() {
                    poly.add_assign(&MultiPoly::monomial(
                        hbar_mono(k as u16),
                        layer[col].clone(),
                    ));
                }
            }
            if !poly.is_zero() {
                out.add_term(mono.clone(), RatFunc::from_poly(poly));
            }
        }
        Ok(out)
    }
}

fn hbar_mono(k: u16) -> crate::coeff::Mono {
    let mut e = crate::coeff::Mono::unit();
    e.0[Var::Hbar as usize] = k;
    e
}

/// One OPE table entry at a fixed rank: `(U_i)_(s) (U_j)` rewritten in the
/// PBW basis. Weight-zero results (multiples of the vacuum) come back as a
/// multiple of the unit monomial.
pub fn ope_entry(
    cache: &mut FieldCache,
    ctxs: &mut BTreeMap<u32, Arc<RewriteContext>>,
    i: u16,
    s: i32,
    j: u16,
) -> Result<UVector, MiuraError> {
    let n = cache.rank();
    if i == 0 || i > n {
        return Err(MiuraError::FieldOutOfRange { j: i, n });
    }
    if j == 0 || j > n {
        return Err(MiuraError::FieldOutOfRange { j, n });
    }
    let w = i as i64 + j as i64 - s as i64 - 1;
    if w < 0 {
        return Ok(UVector::zero());
    }
    let ui = cache.field(i, 0)?;
    let uj = cache.field(j, 0)?;
    let prod = nth_product(&ui, s, &uj)?;
    if w == 0 {
        // multiple of the vacuum
        let c = prod.weight_zero_part();
        return Ok(if c.is_zero() {
            UVector::zero()
        } else {
            UVector::monomial(UMono::unit(), RatFunc::from_poly(c))
        });
    }
    if prod.is_zero() {
        return Ok(UVector::zero());
    }
    let w = w as u32;
    if let std::collections::btree_map::Entry::Vacant(e) = ctxs.entry(w) {
        let ctx = RewriteContext::with_cache(cache, w)?;
        e.insert(Arc::new(ctx));
    }
    ctxs[&w].rewrite(&prod)
}

/// Bundles a field cache with its rewrite contexts for one rank.
pub struct RankWorkspace {
    pub cache: FieldCache,
    pub contexts: BTreeMap<u32, Arc<RewriteContext>>,
}

impl RankWorkspace {
    pub fn new(n: u16) -> Self {
        RankWorkspace {
            cache: FieldCache::new(n),
            contexts: BTreeMap::new(),
        }
    }

    pub fn ope_entry(&mut self, i: u16, s: i32, j: u16) -> Result<UVector, MiuraError> {
        ope_entry(&mut self.cache, &mut self.contexts, i, s, j)
    }

    pub fn field(&mut self, j: u16, d: u16) -> Result<Arc<FockVector>, MiuraError> {
        self.cache.field(j, d)
    }

    pub fn rewrite(&mut self, v: &FockVector) -> Result<UVector, MiuraError> {
        let Some(w) = v.weight() else {
            if v.is_zero() {
                return Ok(UVector::zero());
            }
            return Err(MiuraError::NotHomogeneous);
        };
        if w == 0 {
            return Ok(UVector::monomial(
                UMono::unit(),
                RatFunc::from_poly(v.weight_zero_part()),
            ));
        }
        if !self.contexts.contains_key(&w) {
            let ctx = RewriteContext::with_cache(&mut self.cache, w)?;
            self.contexts.insert(w, Arc::new(ctx));
        }
        self.contexts[&w].rewrite(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::q;

    #[test]
    fn coefficient_examples() {
        // single index, one derivative: i - 1
        for i in 1..=6u16 {
            assert_eq!(miura_coefficient(&[i], &[1]), BigInt::from(i as i64 - 1));
        }
        // all-zero derivative orders: 1
        assert_eq!(miura_coefficient(&[2, 4, 5], &[0, 0, 0]), BigInt::from(1));
        // single index, two derivatives: (i-1)(i-2)/2
        for i in 1..=7u16 {
            let expect = (i as i64 - 1) * (i as i64 - 2) / 2;
            assert_eq!(miura_coefficient(&[i], &[2]), BigInt::from(expect));
        }
    }

    #[test]
    fn first_field_is_sum_of_bosons() {
        let u1 = miura_field(4, 1).unwrap();
        let mut expect = FockVector::zero(4);
        for i in 1..=4 {
            expect.add_term(FockMono::from_modes(vec![(i, 1)]), MultiPoly::one());
        }
        assert_eq!(u1, expect);
    }

    #[test]
    fn rank3_weight2_field() {
        // U_2 at n=3: I1 I2 + I1 I3 + I2 I3 + I2' + 2 I3'
        let u2 = miura_field(3, 2).unwrap();
        let mut expect = FockVector::zero(3);
        for (a, b) in [(1, 2), (1, 3), (2, 3)] {
            expect.add_term(
                FockMono::from_modes(vec![(a, 1), (b, 1)]),
                MultiPoly::one(),
            );
        }
        expect.add_term(FockMono::from_modes(vec![(2, 2)]), MultiPoly::one());
        expect.add_term(
            FockMono::from_modes(vec![(3, 2)]),
            MultiPoly::from_int(2),
        );
        assert_eq!(u2, expect);
    }

    #[test]
    fn recursive_matches_closed_form() {
        for n in 1..=5u16 {
            for j in 1..=n {
                assert_eq!(
                    miura_field(n, j).unwrap(),
                    miura_field_recursive(n, j).unwrap(),
                    "n={n} j={j}"
                );
            }
        }
    }

    #[test]
    fn two_two_recursion_by_hand() {
        // (d + I1)(d + I2) = d^2 + (I1 + I2) d + (I1 I2 + I2')
        let u2 = miura_field_recursive(2, 2).unwrap();
        let mut expect = FockVector::zero(2);
        expect.add_term(FockMono::from_modes(vec![(1, 1), (2, 1)]), MultiPoly::one());
        expect.add_term(FockMono::from_modes(vec![(2, 2)]), MultiPoly::one());
        assert_eq!(u2, expect);
    }

    #[test]
    fn top_field_leading_product_term() {
        // U_n starts with the full product I_1 ... I_n
        for n in 2..=5u16 {
            let top = miura_field_recursive(n, n).unwrap();
            let full = FockMono::from_modes((1..=n).map(|i| (i, 1)).collect());
            assert_eq!(top.coeff_of(&full), MultiPoly::one());
        }
    }

    #[test]
    fn field_out_of_range() {
        assert!(matches!(
            miura_field(3, 4),
            Err(MiuraError::FieldOutOfRange { .. })
        ));
    }

    #[test]
    fn basis_enumeration() {
        assert_eq!(umonos_of_weight(1, 5), vec![UMono::gen(1, 0)]);
        let w2 = umonos_of_weight(2, 5);
        assert_eq!(
            w2,
            vec![
                UMono::from_factors(vec![(1, 0, 2)]),
                UMono::gen(1, 1),
                UMono::gen(2, 0),
            ]
        );
        assert_eq!(umonos_of_weight(3, 5).len(), 6);
        // at small rank high-index generators disappear
        assert!(umonos_of_weight(3, 2)
            .iter()
            .all(|m| m.factors().iter().all(|&(j, _, _)| j <= 2)));
    }

    #[test]
    fn basis_realizations_have_full_rank_weight3() {
        let ctx = RewriteContext::new(5, 3).unwrap();
        assert_eq!(ctx.basis.len(), 6);
        // Gram construction succeeded, so the contraction-free slice already
        // has independent columns; double-check the full matrix rank too.
        let mut dense = SparseCols::new(ctx.row_index.len(), ctx.basis.len());
        for (col, r) in ctx.realizations.iter().enumerate() {
            for (mono, c) in r.terms() {
                dense.push_entry(
                    ctx.row_index[mono],
                    col,
                    c.eval_var(Var::Hbar, &q(1)).as_constant().unwrap(),
                );
            }
        }
        dense.sort_columns();
        assert_eq!(crate::linalg::column_rank(&dense), 6);
    }

    #[test]
    fn full_column_rank_through_weight_six() {
        // the Gram factorization inside the context construction fails on
        // dependent columns, so success here is the rank assertion
        for w in 4..=6u32 {
            let ctx = RewriteContext::new(6, w).unwrap();
            assert_eq!(ctx.basis.len(), umonos_of_weight(w, 6).len());
        }
    }

    #[test]
    fn rewrite_recovers_basis_elements() {
        let mut ws = RankWorkspace::new(4);
        for j in 1..=3u16 {
            let v = ws.field(j, 0).unwrap().as_ref().clone();
            let got = ws.rewrite(&v).unwrap();
            assert_eq!(got, UVector::monomial(UMono::gen(j, 0), RatFunc::one()));
        }
    }

    #[test]
    fn central_term_u1_u1() {
        let mut ws = RankWorkspace::new(3);
        let got = ws.ope_entry(1, 1, 1).unwrap();
        // <U1_(1) U1> = n hbar at n = 3
        let expect = UVector::monomial(
            UMono::unit(),
            RatFunc::from_poly(MultiPoly::var(Var::Hbar).scale(&q(3))),
        );
        assert_eq!(got, expect);
    }

    #[test]
    fn zero_mode_of_u1_kills() {
        let mut ws = RankWorkspace::new(4);
        for j in 1..=4u16 {
            assert!(ws.ope_entry(1, 0, j).unwrap().is_zero());
        }
    }

    #[test]
    fn leading_symbol_triangularity() {
        // hbar^0, derivative-free part of a derivative-free monomial is the
        // product of elementary symmetric polynomials; monomials with
        // derivatives have none.
        use crate::diffpoly::symfun::{e_poly, SymPoly};
        let n = 4u16;
        let mut cache = FieldCache::new(n);
        for mono in umonos_of_weight(3, n) {
            let r = cache.realize(&mono).unwrap();
            // project: hbar^0 and all mode magnitudes 1
            let mut sym = SymPoly::zero(n as usize);
            for (word, c) in r.terms() {
                if !word.is_derivative_free() {
                    continue;
                }
                let c0 = c.coeff_in_var(Var::Hbar, 0);
                if c0.is_zero() {
                    continue;
                }
                let mut exps = vec![0u16; n as usize];
                for &(i, _) in word.modes() {
                    exps[(i - 1) as usize] += 1;
                }
                sym.add_term(exps, c0.as_constant().unwrap());
            }
            if mono.has_derivatives() {
                assert!(sym.is_zero(), "derivative monomial {mono} has a pure symbol");
            } else {
                let mut expect = SymPoly::one(n as usize);
                for &(j, _, m) in mono.factors() {
                    expect = expect.mul(&e_poly(j, n as usize).pow(m as u32));
                }
                assert_eq!(sym, expect, "leading symbol of {mono}");
            }
        }
    }
}
