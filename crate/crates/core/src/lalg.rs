//! The two-parameter structure table: OPE coefficients interpolated in the
//! rank.
//!
//! Each entry `(i, s, j)` is computed at enough integer ranks, every PBW
//! coefficient is interpolated as a polynomial in the rank variable, and the
//! result must reproduce two additional held-out ranks exactly before it is
//! accepted; the rank variable is then renamed `nu`. Sampling extends
//! adaptively until validation passes or the budget runs out.

pub mod derived;

use crate::coeff::{lagrange_interpolate, q, CoeffError, MultiPoly, RatFunc, Var};
use crate::miura::{MiuraError, RankWorkspace, UMono, UVector};
use crate::par::{run_map, Parallelism};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, Mutex};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LalgError {
    #[error("entry ({i},{s},{j}) has negative result weight")]
    NegativeWeight { i: u16, s: i32, j: u16 },
    #[error(
        "interpolation for entry ({i},{s},{j}) did not stabilize within {budget} samples; \
         samples at ranks {ranks:?}"
    )]
    BudgetExhausted {
        i: u16,
        s: i32,
        j: u16,
        budget: usize,
        ranks: Vec<u16>,
    },
    #[error("entry ({i},{s},{j}): coefficient of {mono} is not polynomial")]
    NonPolynomialCoeff { i: u16, s: i32, j: u16, mono: String },
    #[error(transparent)]
    Miura(#[from] MiuraError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// How an entry is sampled in the rank.
#[derive(Clone, Copy, Debug)]
pub struct SamplingPolicy {
    /// First sampled rank; defaults to `max(w+1, i, j, 2)`.
    pub start: Option<u16>,
    /// Maximum number of ranks (samples plus the two held-out points).
    pub budget: usize,
}

impl Default for SamplingPolicy {
    fn default() -> Self {
        SamplingPolicy {
            start: None,
            budget: 16,
        }
    }
}

/// Cutoffs describing which entries a table holds.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TableConfig {
    /// Entries satisfy `i + j <= pair_cutoff`.
    pub pair_cutoff: u16,
    /// Entries satisfy `weight(i,s,j) <= weight_cutoff`.
    pub weight_cutoff: u32,
    /// Most negative tabulated mode index.
    pub s_min: i32,
}

impl Default for TableConfig {
    fn default() -> Self {
        TableConfig {
            pair_cutoff: 5,
            weight_cutoff: 6,
            s_min: 0,
        }
    }
}

impl TableConfig {
    /// All `(i, s, j)` keys the table should contain.
    pub fn keys(&self) -> Vec<(u16, i32, u16)> {
        let mut out = Vec::new();
        for i in 1..self.pair_cutoff {
            for j in 1..self.pair_cutoff {
                if i + j > self.pair_cutoff {
                    continue;
                }
                for s in self.s_min..=(i as i32 + j as i32 - 1) {
                    let w = i as i64 + j as i64 - s as i64 - 1;
                    if w < 0 || w as u32 > self.weight_cutoff {
                        continue;
                    }
                    out.push((i, s, j));
                }
            }
        }
        out
    }
}

/// One interpolated entry.
#[derive(Clone, Debug)]
pub struct StructureEntry {
    pub i: u16,
    pub s: i32,
    pub j: u16,
    /// Coefficients are polynomials in `(nu, hbar)`.
    pub vector: UVector,
    /// Interpolation degree actually observed (max over coefficients).
    pub degree: u32,
    /// Ranks used as interpolation nodes.
    pub samples: Vec<u16>,
    /// Held-out ranks that validated the result.
    pub validation: Vec<u16>,
}

/// The structure-constant table.
#[derive(Clone, Debug)]
pub struct StructureTable {
    pub config: TableConfig,
    pub entries: BTreeMap<(u16, i32, u16), StructureEntry>,
}

impl StructureTable {
    pub fn entry(&self, i: u16, s: i32, j: u16) -> Option<&StructureEntry> {
        self.entries.get(&(i, s, j))
    }
}

/// Shared, lazily populated per-rank workspaces. Cloning the `Arc` shares the
/// cache across threads; each rank is locked independently, so parallel
/// entry computations serialize only when they touch the same rank.
#[derive(Clone, Default)]
pub struct RankPool {
    ranks: Arc<Mutex<BTreeMap<u16, Arc<Mutex<RankWorkspace>>>>>,
}

impl RankPool {
    pub fn new() -> Self {
        Self::default()
    }

    fn workspace(&self, n: u16) -> Arc<Mutex<RankWorkspace>> {
        let mut map = self.ranks.lock().unwrap();
        map.entry(n)
            .or_insert_with(|| Arc::new(Mutex::new(RankWorkspace::new(n))))
            .clone()
    }

    pub fn ope(&self, n: u16, i: u16, s: i32, j: u16) -> Result<UVector, MiuraError> {
        let ws = self.workspace(n);
        let mut guard = ws.lock().unwrap();
        guard.ope_entry(i, s, j)
    }

    /// Runs a closure with exclusive access to one rank workspace.
    pub fn with_rank<R>(&self, n: u16, f: impl FnOnce(&mut RankWorkspace) -> R) -> R {
        let ws = self.workspace(n);
        let mut guard = ws.lock().unwrap();
        f(&mut guard)
    }
}

fn poly_coeff(
    v: &UVector,
    mono: &UMono,
    key: (u16, i32, u16),
) -> Result<MultiPoly, LalgError> {
    let c = v.coeff_of(mono);
    c.as_poly().cloned().ok_or(LalgError::NonPolynomialCoeff {
        i: key.0,
        s: key.1,
        j: key.2,
        mono: mono.to_string(),
    })
}

/// Interpolates one entry in the rank and validates on held-out ranks.
pub fn structure_poly(
    pool: &RankPool,
    i: u16,
    s: i32,
    j: u16,
    policy: SamplingPolicy,
) -> Result<StructureEntry, LalgError> {
    let w = i as i64 + j as i64 - s as i64 - 1;
    if w < 0 {
        return Err(LalgError::NegativeWeight { i, s, j });
    }
    let start = policy
        .start
        .unwrap_or_else(|| (w as u16 + 1).max(i).max(j).max(2));
    let mut computed: BTreeMap<u16, UVector> = BTreeMap::new();
    let mut m = 2usize;
    loop {
        if m + 2 > policy.budget {
            return Err(LalgError::BudgetExhausted {
                i,
                s,
                j,
                budget: policy.budget,
                ranks: computed.keys().copied().collect(),
            });
        }
        let sample_ranks: Vec<u16> = (0..m).map(|k| start + k as u16).collect();
        let holdout = [start + m as u16, start + m as u16 + 1];
        for &n in sample_ranks.iter().chain(holdout.iter()) {
            if let std::collections::btree_map::Entry::Vacant(e) = computed.entry(n) {
                e.insert(pool.ope(n, i, s, j)?);
            }
        }
        // Union of monomials over samples and held-out points.
        let monos: BTreeSet<UMono> = computed
            .values()
            .flat_map(|v| v.terms().map(|(m, _)| m.clone()))
            .collect();
        let mut vector = UVector::zero();
        let mut degree = 0u32;
        let mut ok = true;
        for mono in &monos {
            let points: Vec<_> = sample_ranks
                .iter()
                .map(|&n| {
                    poly_coeff(&computed[&n], mono, (i, s, j))
                        .map(|p| (q(n as i64), p))
                })
                .collect::<Result<_, _>>()?;
            let interp = lagrange_interpolate(Var::N, &points)?;
            for &h in &holdout {
                let predicted = interp.eval_var(Var::N, &q(h as i64));
                let actual = poly_coeff(&computed[&h], mono, (i, s, j))?;
                if predicted != actual {
                    ok = false;
                    break;
                }
            }
            if !ok {
                break;
            }
            degree = degree.max(interp.degree_in(Var::N));
            let renamed = interp.rename_var(Var::N, Var::Nu);
            if !renamed.is_zero() {
                vector.add_term(mono.clone(), RatFunc::from_poly(renamed));
            }
        }
        if ok {
            debug_assert!(
                vector.weight().map_or(true, |got| got as i64 == w),
                "entry ({i},{s},{j}) mixes weights"
            );
            return Ok(StructureEntry {
                i,
                s,
                j,
                vector,
                degree,
                samples: sample_ranks,
                validation: holdout.to_vec(),
            });
        }
        m += 1;
    }
}

/// Builds the whole table; entries are independent work units.
pub fn build_table(
    config: TableConfig,
    policy: SamplingPolicy,
    mode: Parallelism,
) -> Result<StructureTable, LalgError> {
    let pool = RankPool::new();
    build_table_with_pool(&pool, config, policy, mode)
}

pub fn build_table_with_pool(
    pool: &RankPool,
    config: TableConfig,
    policy: SamplingPolicy,
    mode: Parallelism,
) -> Result<StructureTable, LalgError> {
    let keys = config.keys();
    let results = run_map(keys, mode, |(i, s, j)| {
        structure_poly(pool, i, s, j, policy).map(|e| ((i, s, j), e))
    });
    let mut entries = BTreeMap::new();
    for r in results {
        let (k, e) = r?;
        entries.insert(k, e);
    }
    Ok(StructureTable { config, entries })
}

/// Divisibility of every weight-zero part by `nu`.
#[derive(Clone, Debug, Default)]
pub struct DivisibilityReport {
    /// Quotients `entry / nu` for the nonzero vacuum coefficients.
    pub quotients: BTreeMap<(u16, i32, u16), MultiPoly>,
    pub failures: Vec<(u16, i32, u16)>,
}

impl DivisibilityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that `nu` divides the coefficient of the unit monomial of every
/// tabulated entry with `s >= 0`, returning all quotients.
pub fn weight_zero_divisibility(table: &StructureTable) -> DivisibilityReport {
    let nu = MultiPoly::var(Var::Nu);
    let mut report = DivisibilityReport::default();
    for (&key, entry) in &table.entries {
        if key.1 < 0 {
            continue;
        }
        let c = entry.vector.coeff_of(&UMono::unit());
        if c.is_zero() {
            continue;
        }
        let Some(p) = c.as_poly() else {
            report.failures.push(key);
            continue;
        };
        match p.divide_exact(&nu) {
            Some(quot) => {
                report.quotients.insert(key, quot);
            }
            None => report.failures.push(key),
        }
    }
    report
}

/// Result of specializing the table at an integer rank.
#[derive(Clone, Debug, Default)]
pub struct SpecializationReport {
    pub rank: u16,
    pub checked: usize,
    /// Entries whose generators do not exist at this rank.
    pub skipped: usize,
    pub mismatches: Vec<(u16, i32, u16)>,
}

impl SpecializationReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Substitutes `nu = n` into every entry and compares with the directly
/// computed rank-`n` products, exactly.
pub fn specialize_and_compare(
    pool: &RankPool,
    table: &StructureTable,
    n: u16,
    mode: Parallelism,
) -> Result<SpecializationReport, LalgError> {
    // entries referencing generators beyond the rank have no direct
    // counterpart there
    let skipped = table
        .entries
        .keys()
        .filter(|&&(i, _, j)| i > n || j > n)
        .count();
    let keys: Vec<_> = table
        .entries
        .keys()
        .copied()
        .filter(|&(i, _, j)| i <= n && j <= n)
        .collect();
    let results = run_map(keys, mode, |key| -> Result<_, LalgError> {
        let entry = &table.entries[&key];
        let specialized = entry.vector.eval_nu(n as i64)?;
        let direct = pool.ope(n, key.0, key.1, key.2)?;
        Ok((key, specialized == direct))
    });
    let mut report = SpecializationReport {
        rank: n,
        skipped,
        ..Default::default()
    };
    for r in results {
        let (key, ok) = r?;
        report.checked += 1;
        if !ok {
            report.mismatches.push(key);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::miura::UMono;

    fn entry_111() -> StructureEntry {
        let pool = RankPool::new();
        structure_poly(&pool, 1, 1, 1, SamplingPolicy::default()).unwrap()
    }

    #[test]
    fn heisenberg_central_term() {
        let e = entry_111();
        // nu * hbar on the unit monomial, starting at rank 2 with two samples
        let expect = &MultiPoly::var(Var::Nu) * &MultiPoly::var(Var::Hbar);
        assert_eq!(e.vector.num_terms(), 1);
        assert_eq!(e.vector.coeff_of(&UMono::unit()).as_poly(), Some(&expect));
        assert_eq!(e.samples, vec![2, 3]);
        assert_eq!(e.validation, vec![4, 5]);
        assert_eq!(e.degree, 1);
    }

    #[test]
    fn zero_mode_entries_vanish() {
        let pool = RankPool::new();
        for j in 1..=3 {
            let e = structure_poly(&pool, 1, 0, j, SamplingPolicy::default()).unwrap();
            assert!(e.vector.is_zero());
        }
    }

    #[test]
    fn entry_2_3_2_quadratic_part() {
        // <U2_(3) U2> = nu(nu-1)/2 hbar^2 + c1(nu) hbar with c1 interpolated.
        let pool = RankPool::new();
        let e = structure_poly(&pool, 2, 3, 2, SamplingPolicy::default()).unwrap();
        let c = e.vector.coeff_of(&UMono::unit());
        let p = c.as_poly().unwrap();
        let h2 = p.coeff_in_var(Var::Hbar, 2);
        let nu = MultiPoly::var(Var::Nu);
        let expect = (&(&nu * &nu) - &nu).scale(&crate::coeff::qr(1, 2));
        assert_eq!(h2, expect);
        // no hbar-free part
        assert!(p.coeff_in_var(Var::Hbar, 0).is_zero());
    }

    #[test]
    fn small_table_divisibility() {
        let config = TableConfig {
            pair_cutoff: 3,
            weight_cutoff: 4,
            s_min: 0,
        };
        let table =
            build_table(config, SamplingPolicy::default(), Parallelism::Sequential).unwrap();
        let report = weight_zero_divisibility(&table);
        assert!(report.passed(), "failures: {:?}", report.failures);
        // (1,1,1) quotient is hbar
        assert_eq!(
            report.quotients.get(&(1, 1, 1)),
            Some(&MultiPoly::var(Var::Hbar))
        );
    }

    #[test]
    fn small_table_specializes() {
        let config = TableConfig {
            pair_cutoff: 3,
            weight_cutoff: 4,
            s_min: 0,
        };
        let pool = RankPool::new();
        let table = build_table_with_pool(
            &pool,
            config,
            SamplingPolicy::default(),
            Parallelism::Sequential,
        )
        .unwrap();
        let report = specialize_and_compare(&pool, &table, 5, Parallelism::Sequential).unwrap();
        assert!(report.passed(), "mismatches: {:?}", report.mismatches);
        assert_eq!(report.checked, table.entries.len());
    }

    #[test]
    fn budget_exhaustion_is_diagnosed() {
        let pool = RankPool::new();
        let policy = SamplingPolicy {
            start: None,
            budget: 3, // cannot hold two samples plus two held-out ranks
        };
        match structure_poly(&pool, 1, 1, 1, policy) {
            Err(LalgError::BudgetExhausted { i, s, j, budget, .. }) => {
                assert_eq!((i, s, j, budget), (1, 1, 1, 3));
            }
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn negative_s_entry_builds() {
        let pool = RankPool::new();
        let e = structure_poly(&pool, 1, -1, 1, SamplingPolicy::default()).unwrap();
        // U1_(-1) U1 at weight 2: the normally ordered square plus corrections
        assert_eq!(e.vector.weight(), Some(2));
    }
}
