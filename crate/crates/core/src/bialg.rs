//! The comultiplication, counit, and the bialgebra certificates.
//!
//! The comultiplication sends a generator to a binomial-weighted sum of
//! tensor products of generators; its rank parameter splits as
//! `nu -> nu1 + nu2`. Verification is grounded in Fock space: at integer
//! ranks `(m, n')` the tensor factors live on disjoint boson blocks inside
//! the rank-`(m+n')` Fock space, both sides of each identity are computed
//! as honest vectors there, and the polynomial identity in `(nu1, nu2)` is
//! certified by interpolation over a grid with held-out validation.

use crate::coeff::{
    lagrange_interpolate, q, symbolic_binomial, CoeffError, MultiPoly, Rational, Var,
};
use crate::fock::{nth_product, translate_n, FockError, FockMono, FockVector};
use crate::lalg::StructureTable;
use crate::linalg::{LayeredSystem, LinalgError, SparseCols};
use crate::miura::{umonos_of_weight, FieldCache, MiuraError, UMono, UVector};
use num::traits::Zero;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, Mutex};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BialgError {
    #[error("structure table has no entry ({0},{1},{2})")]
    MissingEntry(u16, i32, u16),
    #[error("tensor expansion failed at ranks ({m},{np}), weight {w}: {detail}")]
    ExpansionFailure { m: u16, np: u16, w: u32, detail: String },
    #[error(transparent)]
    Miura(#[from] MiuraError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// An element of the tensor square: pairs of PBW monomials with coefficients
/// polynomial in `(nu1, nu2, hbar)`.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct TensorUVector {
    terms: BTreeMap<(UMono, UMono), MultiPoly>,
}

impl TensorUVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(UMono, UMono), &MultiPoly)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, left: UMono, right: UMono, coeff: MultiPoly) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((left, right)) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                e.get_mut().add_assign(&coeff);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }
}

impl fmt::Display for TensorUVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((l, r), c) in self.terms.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}) {} (x) {}", c, l, r)?;
        }
        Ok(())
    }
}

/// The comultiplication on one generator:
/// `U_j -> sum_{a+b<=j} binom(nu1 - a, j-a-b) U_a (x) U_b^(j-a-b)`
/// with `U_0` the unit (whose derivatives vanish).
pub fn delta_gen(j: u16) -> TensorUVector {
    assert!(j >= 1);
    let nu1 = MultiPoly::var(Var::Nu1);
    let mut out = TensorUVector::zero();
    for a in 0..=j {
        for b in 0..=(j - a) {
            let d = j - a - b;
            if b == 0 && d > 0 {
                continue; // derivative of the unit
            }
            if a == 0 && b == 0 {
                continue;
            }
            let coeff = symbolic_binomial(&(&nu1 - &MultiPoly::from_int(a as i64)), d as u32);
            if coeff.is_zero() {
                continue;
            }
            let left = if a == 0 { UMono::unit() } else { UMono::gen(a, 0) };
            let right = if b == 0 {
                UMono::unit()
            } else {
                UMono::gen(b, d)
            };
            out.add_term(left, right, coeff);
        }
    }
    out
}

/// Caches everything needed at one pair of tensor ranks `(m, n')`:
/// realizations of both factors on disjoint boson blocks of the rank-`m+n'`
/// Fock space, the comultiplication images of the generators, and the
/// product-basis expansion systems.
pub struct SplitCache {
    pub m: u16,
    pub np: u16,
    left: FieldCache,
    right: FieldCache,
    delta_states: BTreeMap<(u16, u16), Arc<FockVector>>,
    bases: BTreeMap<u32, ProductBasis>,
}

struct ProductBasis {
    pairs: Vec<(UMono, UMono)>,
    row_index: BTreeMap<FockMono, usize>,
    system: LayeredSystem,
}

impl SplitCache {
    pub fn new(m: u16, np: u16) -> Self {
        SplitCache {
            m,
            np,
            left: FieldCache::new(m),
            right: FieldCache::new(np),
            delta_states: BTreeMap::new(),
            bases: BTreeMap::new(),
        }
    }

    pub fn total_rank(&self) -> u16 {
        self.m + self.np
    }

    // Generators beyond a factor's rank specialize to zero: the rank
    // surjection kills U_a for a > rank, matching the truncation of the
    // symbol product where a rank-m operator has no coefficient beyond m.
    fn left_realize(&mut self, mono: &UMono) -> Result<FockVector, MiuraError> {
        if mono.factors().iter().any(|&(j, _, _)| j > self.m) {
            return Ok(FockVector::zero(self.m + self.np));
        }
        Ok(self.left.realize(mono)?.with_rank(self.m + self.np))
    }

    fn right_realize(&mut self, mono: &UMono) -> Result<FockVector, MiuraError> {
        if mono.factors().iter().any(|&(j, _, _)| j > self.np) {
            return Ok(FockVector::zero(self.m + self.np));
        }
        Ok(self
            .right
            .realize(mono)?
            .shift_generators(self.m, self.m + self.np))
    }

    /// The comultiplication image of `U_j^(d)` as a rank-`m+n'` vector.
    pub fn delta_state(&mut self, j: u16, d: u16) -> Result<Arc<FockVector>, BialgError> {
        if let Some(v) = self.delta_states.get(&(j, d)) {
            return Ok(v.clone());
        }
        let base = if d == 0 {
            let mut acc = FockVector::zero(self.total_rank());
            for ((l, r), coeff) in delta_gen(j).terms() {
                let c = coeff.eval_var(Var::Nu1, &q(self.m as i64));
                let lv = self.left_realize(l)?;
                let rv = self.right_realize(r)?;
                acc.add_assign(&lv.mul_disjoint(&rv).scale(&c));
            }
            acc
        } else {
            translate_n(self.delta_state(j, 0)?.as_ref(), d as u32)
        };
        let arc = Arc::new(base);
        self.delta_states.insert((j, d), arc.clone());
        Ok(arc)
    }

    /// The comultiplication image of a PBW monomial: the right-nested
    /// normally ordered product of the generator images, in canonical order.
    pub fn delta_realize_umono(&mut self, mono: &UMono) -> Result<FockVector, BialgError> {
        let factors = mono.expanded();
        if factors.is_empty() {
            return Ok(FockVector::vacuum(self.total_rank()));
        }
        let (lj, ld) = *factors.last().unwrap();
        let mut state = self.delta_state(lj, ld)?.as_ref().clone();
        for &(jj, dd) in factors.iter().rev().skip(1) {
            let leftf = self.delta_state(jj, dd)?;
            state = nth_product(&leftf, -1, &state)?;
        }
        Ok(state)
    }

    /// The comultiplication image of an interpolated element, specialized at
    /// `nu = m + n'`.
    pub fn delta_realize_uvector(&mut self, v: &UVector) -> Result<FockVector, BialgError> {
        let n_total = self.total_rank() as i64;
        let mut acc = FockVector::zero(self.total_rank());
        for (mono, coeff) in v.terms() {
            let at_rank = coeff.eval_var(Var::Nu, &q(n_total))?;
            let poly = at_rank
                .as_poly()
                .cloned()
                .ok_or_else(|| BialgError::ExpansionFailure {
                    m: self.m,
                    np: self.np,
                    w: 0,
                    detail: format!("denominator survives at nu = {n_total}"),
                })?;
            let state = self.delta_realize_umono(mono)?;
            acc.add_assign(&state.scale(&poly));
        }
        Ok(acc)
    }

    fn basis(&mut self, w: u32) -> Result<&ProductBasis, BialgError> {
        if !self.bases.contains_key(&w) {
            let mut pairs = Vec::new();
            let mut realizations: Vec<FockVector> = Vec::new();
            for wp in 0..=w {
                for p in umonos_of_weight(wp, self.m) {
                    let lv = self.left_realize(&p)?;
                    for q_ in umonos_of_weight(w - wp, self.np) {
                        let rv = self.right_realize(&q_)?;
                        pairs.push((p.clone(), q_.clone()));
                        realizations.push(lv.mul_disjoint(&rv));
                    }
                }
            }
            let mut row_index: BTreeMap<FockMono, usize> = BTreeMap::new();
            for r in &realizations {
                for (mono, _) in r.terms() {
                    let next = row_index.len();
                    row_index.entry(mono.clone()).or_insert(next);
                }
            }
            let mut max_deg = 0usize;
            for r in &realizations {
                for (_, c) in r.terms() {
                    max_deg = max_deg.max(c.degree_in(Var::Hbar) as usize);
                }
            }
            let nrows = row_index.len();
            let mut slices: Vec<SparseCols> = (0..=max_deg)
                .map(|_| SparseCols::new(nrows, pairs.len()))
                .collect();
            for (col, r) in realizations.iter().enumerate() {
                for (mono, c) in r.terms() {
                    let row = row_index[mono];
                    for (k, part) in c.slices_in_var(Var::Hbar).into_iter().enumerate() {
                        if let Some(v) = part.as_constant() {
                            slices[k].push_entry(row, col, v);
                        } else {
                            return Err(BialgError::ExpansionFailure {
                                m: self.m,
                                np: self.np,
                                w,
                                detail: "nonpolynomial realization coefficient".into(),
                            });
                        }
                    }
                }
            }
            let system = LayeredSystem::new(slices)?;
            self.bases.insert(
                w,
                ProductBasis {
                    pairs,
                    row_index,
                    system,
                },
            );
        }
        Ok(&self.bases[&w])
    }

    /// Expands a weight-`w` vector in the product basis.
    pub fn expand(
        &mut self,
        v: &FockVector,
        w: u32,
    ) -> Result<BTreeMap<(UMono, UMono), MultiPoly>, BialgError> {
        let (m, np) = (self.m, self.np);
        let basis = self.basis(w)?;
        let mut rhs: Vec<Vec<Rational>> = Vec::new();
        for (mono, c) in v.terms() {
            let Some(&row) = basis.row_index.get(mono) else {
                return Err(BialgError::ExpansionFailure {
                    m,
                    np,
                    w,
                    detail: format!("word {mono} outside the product-basis span"),
                });
            };
            for (k, part) in c.slices_in_var(Var::Hbar).into_iter().enumerate() {
                let value = part.as_constant().expect("hbar-only coefficients");
                if value.is_zero() {
                    continue;
                }
                while rhs.len() <= k {
                    rhs.push(vec![q(0); basis.row_index.len()]);
                }
                rhs[k][row] = value;
            }
        }
        let x = basis
            .system
            .solve(&rhs)
            .map_err(|e| BialgError::ExpansionFailure {
                m,
                np,
                w,
                detail: e.to_string(),
            })?;
        let mut out = BTreeMap::new();
        for (col, pair) in basis.pairs.iter().enumerate() {
            let mut poly = MultiPoly::zero();
            for (k, layer) in x.iter().enumerate() {
                if !layer[col].is_zero() {
                    let mut mono = crate::coeff::Mono::unit();
                    mono.0[Var::Hbar as usize] = k as u16;
                    poly.add_assign(&MultiPoly::monomial(mono, layer[col].clone()));
                }
            }
            if !poly.is_zero() {
                out.insert(pair.clone(), poly);
            }
        }
        Ok(out)
    }
}

/// Shared pool of split caches, mirroring `lalg::RankPool`.
#[derive(Clone, Default)]
pub struct SplitPool {
    caches: Arc<Mutex<BTreeMap<(u16, u16), Arc<Mutex<SplitCache>>>>>,
}

impl SplitPool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_split<R>(&self, m: u16, np: u16, f: impl FnOnce(&mut SplitCache) -> R) -> R {
        let cache = {
            let mut map = self.caches.lock().unwrap();
            map.entry((m, np))
                .or_insert_with(|| Arc::new(Mutex::new(SplitCache::new(m, np))))
                .clone()
        };
        let mut guard = cache.lock().unwrap();
        f(&mut guard)
    }
}

/// Result of the splitting comparison at ranks `(m, n')`.
#[derive(Clone, Debug)]
pub struct SplittingReport {
    pub m: u16,
    pub np: u16,
    pub j: u16,
    pub passed: bool,
}

/// Checks that the comultiplication formula specialized at `nu1 = m` realizes
/// the factorized Miura field: the binomial-weighted sum of disjoint products
/// must equal `U_j` at rank `m + n'`, exactly.
pub fn delta_splitting_check(
    pool: &SplitPool,
    m: u16,
    np: u16,
    j: u16,
) -> Result<SplittingReport, BialgError> {
    pool.with_split(m, np, |cache| {
        let candidate = cache.delta_state(j, 0)?.as_ref().clone();
        // beyond the total rank the field is the vanishing high coefficient
        // of a finite-order operator
        let direct = if j > m + np {
            FockVector::zero(m + np)
        } else {
            crate::miura::miura_field(m + np, j)?
        };
        Ok(SplittingReport {
            m,
            np,
            j,
            passed: candidate == direct,
        })
    })
}

/// Result of one morphism certificate.
#[derive(Clone, Debug)]
pub struct MorphismReport {
    pub i: u16,
    pub s: i32,
    pub j: u16,
    /// Grid points where the two Fock-space sides disagree.
    pub fock_failures: Vec<(u16, u16)>,
    /// Whether the interpolated tensor polynomials of both sides agree.
    pub polynomial_match: bool,
    /// Whether the held-out point reproduces the interpolated polynomials.
    pub holdout_ok: bool,
    /// The grid that certified the identity (extended adaptively when the
    /// base grid cannot carry the polynomial degree).
    pub grid: Vec<u16>,
    pub holdout: (u16, u16),
}

impl MorphismReport {
    pub fn passed(&self) -> bool {
        self.fock_failures.is_empty() && self.polynomial_match && self.holdout_ok
    }
}

type TensorCoeffs = BTreeMap<(UMono, UMono), MultiPoly>;

fn both_sides_at(
    pool: &SplitPool,
    entry: &UVector,
    i: u16,
    s: i32,
    j: u16,
    m: u16,
    np: u16,
) -> Result<(bool, TensorCoeffs, TensorCoeffs), BialgError> {
    pool.with_split(m, np, |cache| {
        let w = (i as i64 + j as i64 - s as i64 - 1) as u32;
        // left side: the table entry pushed through the comultiplication
        let lhs = cache.delta_realize_uvector(entry)?;
        // right side: the tensor-structure product of the generator images
        let xi = cache.delta_state(i, 0)?;
        let xj = cache.delta_state(j, 0)?;
        let rhs = nth_product(&xi, s, &xj)?;
        let fock_equal = lhs == rhs;
        let lhs_exp = cache.expand(&lhs, w)?;
        let rhs_exp = cache.expand(&rhs, w)?;
        Ok((fock_equal, lhs_exp, rhs_exp))
    })
}

/// Interpolates grid samples `(m, n') -> value` into a polynomial in
/// `(nu1, nu2)` by nested interpolation.
fn interpolate_grid(
    samples: &BTreeMap<(u16, u16), MultiPoly>,
    ms: &[u16],
    nps: &[u16],
) -> Result<MultiPoly, CoeffError> {
    let mut outer: Vec<(Rational, MultiPoly)> = Vec::new();
    for &m in ms {
        let inner: Vec<(Rational, MultiPoly)> = nps
            .iter()
            .map(|&np| {
                (
                    q(np as i64),
                    samples.get(&(m, np)).cloned().unwrap_or_else(MultiPoly::zero),
                )
            })
            .collect();
        let p = lagrange_interpolate(Var::N, &inner)?.rename_var(Var::N, Var::Nu2);
        outer.push((q(m as i64), p));
    }
    Ok(lagrange_interpolate(Var::N, &outer)?.rename_var(Var::N, Var::Nu1))
}

/// Runs the full certificate for one entry: Fock equality at every grid
/// point, interpolation of both sides to polynomials in `(nu1, nu2)`,
/// equality of those polynomials, and held-out validation. Starting from the
/// base grid, the grid is extended (the interpolation degree is never
/// assumed) until the held-out point reproduces the interpolated
/// polynomials, or the extension budget runs out.
pub fn morphism_certificate(
    pool: &SplitPool,
    table: &StructureTable,
    i: u16,
    s: i32,
    j: u16,
    base_grid: &[u16],
    extensions: usize,
) -> Result<MorphismReport, BialgError> {
    let entry = table
        .entry(i, s, j)
        .ok_or(BialgError::MissingEntry(i, s, j))?;
    let mut grid: Vec<u16> = base_grid.to_vec();
    let mut report = certificate_on_grid(pool, &entry.vector, i, s, j, &grid)?;
    for _ in 0..extensions {
        if report.passed() || !report.fock_failures.is_empty() {
            break;
        }
        grid.push(grid.last().copied().unwrap_or(3) + 1);
        report = certificate_on_grid(pool, &entry.vector, i, s, j, &grid)?;
    }
    Ok(report)
}

fn certificate_on_grid(
    pool: &SplitPool,
    entry: &UVector,
    i: u16,
    s: i32,
    j: u16,
    grid: &[u16],
) -> Result<MorphismReport, BialgError> {
    let top = *grid.last().expect("nonempty grid");
    let holdout = (top + 1, top + 1);
    let mut fock_failures = Vec::new();
    let mut lhs_samples: BTreeMap<(u16, u16), TensorCoeffs> = BTreeMap::new();
    let mut rhs_samples: BTreeMap<(u16, u16), TensorCoeffs> = BTreeMap::new();
    for &m in grid {
        for &np in grid {
            let (ok, l, r) = both_sides_at(pool, entry, i, s, j, m, np)?;
            if !ok {
                fock_failures.push((m, np));
            }
            lhs_samples.insert((m, np), l);
            rhs_samples.insert((m, np), r);
        }
    }
    // all tensor keys seen anywhere
    let keys: BTreeSet<(UMono, UMono)> = lhs_samples
        .values()
        .chain(rhs_samples.values())
        .flat_map(|m| m.keys().cloned())
        .collect();
    let mut polynomial_match = true;
    let mut lhs_polys: BTreeMap<(UMono, UMono), MultiPoly> = BTreeMap::new();
    for key in &keys {
        let collect = |samples: &BTreeMap<(u16, u16), TensorCoeffs>| {
            samples
                .iter()
                .map(|(&pt, m)| (pt, m.get(key).cloned().unwrap_or_else(MultiPoly::zero)))
                .collect::<BTreeMap<_, _>>()
        };
        let lp = interpolate_grid(&collect(&lhs_samples), grid, grid)?;
        let rp = interpolate_grid(&collect(&rhs_samples), grid, grid)?;
        if lp != rp {
            polynomial_match = false;
        }
        lhs_polys.insert(key.clone(), lp);
    }
    // held-out validation of the interpolated polynomials
    let (hold_ok_fock, hold_l, _hold_r) = both_sides_at(pool, entry, i, s, j, holdout.0, holdout.1)?;
    let mut holdout_ok = hold_ok_fock;
    let hold_keys: BTreeSet<(UMono, UMono)> =
        keys.iter().cloned().chain(hold_l.keys().cloned()).collect();
    for key in hold_keys {
        let predicted = lhs_polys
            .get(&key)
            .map(|p| {
                p.eval_var(Var::Nu1, &q(holdout.0 as i64))
                    .eval_var(Var::Nu2, &q(holdout.1 as i64))
            })
            .unwrap_or_else(MultiPoly::zero);
        let actual = hold_l.get(&key).cloned().unwrap_or_else(MultiPoly::zero);
        if predicted != actual {
            holdout_ok = false;
        }
    }
    Ok(MorphismReport {
        i,
        s,
        j,
        fock_failures,
        polynomial_match,
        holdout_ok,
        grid: grid.to_vec(),
        holdout,
    })
}

/// Triple tensors for the coassociativity check.
#[derive(Clone, PartialEq, Debug, Default)]
struct Tensor3 {
    terms: BTreeMap<(UMono, UMono, UMono), MultiPoly>,
}

impl Tensor3 {
    fn add_term(&mut self, k: (UMono, UMono, UMono), c: MultiPoly) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(k) {
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
}

fn single_gen(mono: &UMono) -> Option<(u16, u16)> {
    if mono.is_unit() {
        return Some((0, 0));
    }
    let f = mono.factors();
    if f.len() == 1 && f[0].2 == 1 {
        Some((f[0].0, f[0].1))
    } else {
        None
    }
}

/// `(Delta (x) id) Delta(U_j)`: the outer rank parameter becomes `nu1 + nu2`.
fn delta_left_assoc(j: u16) -> Tensor3 {
    let nu12 = &MultiPoly::var(Var::Nu1) + &MultiPoly::var(Var::Nu2);
    let mut out = Tensor3::default();
    for ((l, r), c) in delta_gen(j).terms() {
        let outer = c.subst_var(Var::Nu1, &nu12);
        let (a, d) = single_gen(l).expect("comultiplication emits single generators");
        assert_eq!(d, 0);
        if a == 0 {
            out.add_term((UMono::unit(), UMono::unit(), r.clone()), outer);
        } else {
            for ((l2, r2), c2) in delta_gen(a).terms() {
                out.add_term((l2.clone(), r2.clone(), r.clone()), &outer * c2);
            }
        }
    }
    out
}

/// `(id (x) Delta) Delta(U_j)`: the inner comultiplication uses `nu2` and the
/// translation operator distributes binomially over the two right factors.
fn delta_right_assoc(j: u16) -> Tensor3 {
    let mut out = Tensor3::default();
    for ((l, r), c) in delta_gen(j).terms() {
        let (b, d) = single_gen(r).expect("comultiplication emits single generators");
        if b == 0 {
            assert_eq!(d, 0);
            out.add_term((l.clone(), UMono::unit(), UMono::unit()), c.clone());
            continue;
        }
        let inner = {
            let mut t = TensorUVector::zero();
            for ((l2, r2), c2) in delta_gen(b).terms() {
                t.add_term(l2.clone(), r2.clone(), c2.rename_var(Var::Nu1, Var::Nu2));
            }
            t
        };
        for ((l2, r2), c2) in inner.terms() {
            for t in 0..=d {
                let binom = crate::coeff::binom_nonneg(d as i64, t as u32);
                if num::traits::Zero::is_zero(&binom) {
                    continue;
                }
                let (a2, d2) = single_gen(l2).expect("single generator");
                let (b2, e2) = single_gen(r2).expect("single generator");
                // T^t on the middle factor, T^(d-t) on the right factor
                if a2 == 0 && t > 0 {
                    continue;
                }
                if b2 == 0 && d - t > 0 {
                    continue;
                }
                let mid = if a2 == 0 {
                    UMono::unit()
                } else {
                    UMono::gen(a2, d2 + t)
                };
                let rightm = if b2 == 0 {
                    UMono::unit()
                } else {
                    UMono::gen(b2, e2 + d - t)
                };
                let coeff = (c * c2).scale(&Rational::from(binom));
                out.add_term((l.clone(), mid, rightm), coeff);
            }
        }
    }
    out
}

/// Outcome of the symbolic coassociativity and counit checks for one
/// generator.
#[derive(Clone, Debug)]
pub struct CoassocReport {
    pub j: u16,
    pub coassociative: bool,
    pub counit_left: bool,
    pub counit_right: bool,
}

impl CoassocReport {
    pub fn passed(&self) -> bool {
        self.coassociative && self.counit_left && self.counit_right
    }
}

/// `(Delta (x) id) Delta = (id (x) Delta) Delta` and both counit identities,
/// as exact polynomial statements.
pub fn coassoc_and_counit_check(j: u16) -> CoassocReport {
    let coassociative = delta_left_assoc(j) == delta_right_assoc(j);
    // (eta (x) id) Delta(U_j) = U_j: keep unit-left terms, evaluate nu1 = 0
    let mut left_result = UVector::zero();
    for ((l, r), c) in delta_gen(j).terms() {
        if l.is_unit() {
            let v = c.eval_var(Var::Nu1, &q(0));
            left_result.add_term(r.clone(), crate::coeff::RatFunc::from_poly(v));
        }
    }
    let expect = UVector::monomial(UMono::gen(j, 0), crate::coeff::RatFunc::one());
    let counit_left = left_result == expect;
    // (id (x) eta) Delta(U_j) = U_j: keep unit-right terms (eta does not touch nu1)
    let mut right_result = UVector::zero();
    for ((l, r), c) in delta_gen(j).terms() {
        if r.is_unit() {
            right_result.add_term(l.clone(), crate::coeff::RatFunc::from_poly(c.clone()));
        }
    }
    let counit_right = right_result == expect;
    CoassocReport {
        j,
        coassociative,
        counit_left,
        counit_right,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_on_first_generators() {
        // j = 1: U1 (x) 1 + 1 (x) U1
        let d1 = delta_gen(1);
        let mut expect = TensorUVector::zero();
        expect.add_term(UMono::gen(1, 0), UMono::unit(), MultiPoly::one());
        expect.add_term(UMono::unit(), UMono::gen(1, 0), MultiPoly::one());
        assert_eq!(d1, expect);

        // j = 2: U2 (x) 1 + U1 (x) U1 + nu1 1 (x) U1' + 1 (x) U2
        let d2 = delta_gen(2);
        let mut expect = TensorUVector::zero();
        expect.add_term(UMono::gen(2, 0), UMono::unit(), MultiPoly::one());
        expect.add_term(UMono::gen(1, 0), UMono::gen(1, 0), MultiPoly::one());
        expect.add_term(UMono::unit(), UMono::gen(1, 1), MultiPoly::var(Var::Nu1));
        expect.add_term(UMono::unit(), UMono::gen(2, 0), MultiPoly::one());
        assert_eq!(d2, expect);
    }

    #[test]
    fn splitting_trivial_weight_one() {
        let pool = SplitPool::new();
        for (m, np) in [(2u16, 2u16), (2, 3), (3, 2)] {
            let rep = delta_splitting_check(&pool, m, np, 1).unwrap();
            assert!(rep.passed);
        }
    }

    #[test]
    fn splitting_weight_two() {
        let pool = SplitPool::new();
        let rep = delta_splitting_check(&pool, 2, 2, 2).unwrap();
        assert!(rep.passed);
        let rep = delta_splitting_check(&pool, 3, 2, 4).unwrap();
        assert!(rep.passed);
    }

    #[test]
    fn coassociativity_small() {
        for j in 1..=4 {
            let rep = coassoc_and_counit_check(j);
            assert!(rep.passed(), "j = {j}: {rep:?}");
        }
    }

    #[test]
    fn morphism_certificate_on_central_entry() {
        use crate::lalg::{build_table_with_pool, RankPool, SamplingPolicy, TableConfig};
        use crate::par::Parallelism;
        let rank_pool = RankPool::new();
        let table = build_table_with_pool(
            &rank_pool,
            TableConfig {
                pair_cutoff: 2,
                weight_cutoff: 2,
                s_min: 0,
            },
            SamplingPolicy::default(),
            Parallelism::Sequential,
        )
        .unwrap();
        let pool = SplitPool::new();
        let rep = morphism_certificate(&pool, &table, 1, 1, 1, &[2, 3], 2).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.grid, vec![2, 3]);
    }
}
