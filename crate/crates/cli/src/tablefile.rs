//! Persistent structure-table files.
//!
//! The on-disk format is versioned JSON with a content hash over the entry
//! array. Serialization is deterministic (entries and terms in canonical
//! order, struct fields in declaration order), so identical tables produce
//! byte-identical files and loading followed by re-serialization is the
//! identity.

use anyhow::{bail, Context, Result};
use num::BigInt;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::str::FromStr;
use vertexalg::coeff::{Mono, MultiPoly, RatFunc, Rational, Var};
use vertexalg::lalg::{StructureEntry, StructureTable, TableConfig};
use vertexalg::miura::{UMono, UVector};

pub const SCHEMA: &str = "vertexalg.table/1";

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct TableFile {
    pub schema: String,
    pub meta: TableMeta,
    pub entries: Vec<EntryJson>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct TableMeta {
    pub cutoffs: CutoffsJson,
    /// `[i, s, j, degree]` per entry, in entry order.
    pub degrees: Vec<[i64; 4]>,
    /// `[i, s, j, first_sample, last_sample, heldout1, heldout2]` per entry.
    pub validation_points: Vec<[i64; 7]>,
    /// Normalization constants determined by the derived-element suites.
    pub ledger: BTreeMap<String, String>,
    pub version: String,
    pub hash: String,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct CutoffsJson {
    pub pair: u16,
    pub weight: u32,
    pub s_min: i32,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct EntryJson {
    pub i: u16,
    pub s: i32,
    pub j: u16,
    pub terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct TermJson {
    /// Sorted list of `[generator index, derivative order, multiplicity]`.
    pub monomial: Vec<[u16; 3]>,
    /// Sparse polynomial in `(nu, hbar)`: exponent pair plus rational value.
    pub coeff: Vec<CoeffTermJson>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct CoeffTermJson {
    pub e: [u16; 2],
    pub c: String,
}

fn rational_to_string(r: &Rational) -> String {
    if num::traits::One::is_one(r.denom()) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn rational_from_string(s: &str) -> Result<Rational> {
    match s.split_once('/') {
        Some((n, d)) => Ok(Rational::new(
            BigInt::from_str(n).context("bad numerator")?,
            BigInt::from_str(d).context("bad denominator")?,
        )),
        None => Ok(Rational::from(BigInt::from_str(s).context("bad integer")?)),
    }
}

fn poly_to_json(p: &MultiPoly) -> Result<Vec<CoeffTermJson>> {
    let mut out = Vec::new();
    for (mono, c) in p.terms() {
        for (k, v) in Var::ALL.iter().enumerate() {
            if *v != Var::Nu && *v != Var::Hbar && mono.0[k] != 0 {
                bail!("coefficient uses variable {} outside (nu, hbar)", v.name());
            }
        }
        out.push(CoeffTermJson {
            e: [mono.0[Var::Nu as usize], mono.0[Var::Hbar as usize]],
            c: rational_to_string(c),
        });
    }
    Ok(out)
}

fn poly_from_json(terms: &[CoeffTermJson]) -> Result<MultiPoly> {
    let mut p = MultiPoly::zero();
    for t in terms {
        let mut mono = Mono::unit();
        mono.0[Var::Nu as usize] = t.e[0];
        mono.0[Var::Hbar as usize] = t.e[1];
        p.add_term(mono, rational_from_string(&t.c)?);
    }
    Ok(p)
}

fn entries_hash(entries: &[EntryJson]) -> String {
    let bytes = serde_json::to_vec(entries).expect("serializable entries");
    hex::encode(Sha256::digest(&bytes))
}

/// Converts a built table (plus ledger constants) to its file form.
pub fn to_file(table: &StructureTable, ledger: BTreeMap<String, String>) -> Result<TableFile> {
    let mut entries = Vec::new();
    let mut degrees = Vec::new();
    let mut validation = Vec::new();
    for (&(i, s, j), entry) in &table.entries {
        let mut terms = Vec::new();
        for (mono, coeff) in entry.vector.terms() {
            let poly = coeff
                .as_poly()
                .context("table coefficients must be polynomial")?;
            terms.push(TermJson {
                monomial: entry_monomial(mono),
                coeff: poly_to_json(poly)?,
            });
        }
        entries.push(EntryJson {
            i,
            s,
            j,
            terms,
        });
        degrees.push([i as i64, s as i64, j as i64, entry.degree as i64]);
        validation.push([
            i as i64,
            s as i64,
            j as i64,
            *entry.samples.first().unwrap_or(&0) as i64,
            *entry.samples.last().unwrap_or(&0) as i64,
            entry.validation.first().copied().unwrap_or(0) as i64,
            entry.validation.last().copied().unwrap_or(0) as i64,
        ]);
    }
    let hash = entries_hash(&entries);
    Ok(TableFile {
        schema: SCHEMA.to_string(),
        meta: TableMeta {
            cutoffs: CutoffsJson {
                pair: table.config.pair_cutoff,
                weight: table.config.weight_cutoff,
                s_min: table.config.s_min,
            },
            degrees,
            validation_points: validation,
            ledger,
            version: env!("CARGO_PKG_VERSION").to_string(),
            hash,
        },
        entries,
    })
}

fn entry_monomial(mono: &UMono) -> Vec<[u16; 3]> {
    mono.factors().iter().map(|&(j, d, m)| [j, d, m]).collect()
}

/// Parses and validates a file back into a structure table.
pub fn from_file(file: &TableFile) -> Result<StructureTable> {
    if file.schema != SCHEMA {
        bail!(
            "schema mismatch: file declares '{}', this build reads '{}'",
            file.schema,
            SCHEMA
        );
    }
    let recomputed = entries_hash(&file.entries);
    if recomputed != file.meta.hash {
        bail!(
            "content hash mismatch: file says {}, entries hash to {}",
            file.meta.hash,
            recomputed
        );
    }
    let degree_of: BTreeMap<(u16, i32, u16), u32> = file
        .meta
        .degrees
        .iter()
        .map(|d| ((d[0] as u16, d[1] as i32, d[2] as u16), d[3] as u32))
        .collect();
    let validation_of: BTreeMap<(u16, i32, u16), [i64; 4]> = file
        .meta
        .validation_points
        .iter()
        .map(|v| {
            (
                (v[0] as u16, v[1] as i32, v[2] as u16),
                [v[3], v[4], v[5], v[6]],
            )
        })
        .collect();
    let mut entries = BTreeMap::new();
    for e in &file.entries {
        let key = (e.i, e.s, e.j);
        let mut vector = UVector::zero();
        for t in &e.terms {
            let mono = UMono::from_factors(t.monomial.iter().map(|&[j, d, m]| (j, d, m)).collect());
            vector.add_term(mono, RatFunc::from_poly(poly_from_json(&t.coeff)?));
        }
        let v = validation_of.get(&key).copied().unwrap_or([0, 0, 0, 0]);
        entries.insert(
            key,
            StructureEntry {
                i: e.i,
                s: e.s,
                j: e.j,
                vector,
                degree: degree_of.get(&key).copied().unwrap_or(0),
                samples: (v[0]..=v[1]).map(|n| n as u16).collect(),
                validation: vec![v[2] as u16, v[3] as u16],
            },
        );
    }
    Ok(StructureTable {
        config: TableConfig {
            pair_cutoff: file.meta.cutoffs.pair,
            weight_cutoff: file.meta.cutoffs.weight,
            s_min: file.meta.cutoffs.s_min,
        },
        entries,
    })
}

pub fn render(file: &TableFile) -> String {
    serde_json::to_string_pretty(file).expect("serializable") + "\n"
}

pub fn parse(text: &str) -> Result<TableFile> {
    serde_json::from_str(text).context("malformed table file")
}

#[cfg(test)]
mod tests {
    use super::*;
    use vertexalg::lalg::{build_table, SamplingPolicy};
    use vertexalg::par::Parallelism;

    fn tiny_table() -> StructureTable {
        build_table(
            TableConfig {
                pair_cutoff: 2,
                weight_cutoff: 2,
                s_min: 0,
            },
            SamplingPolicy::default(),
            Parallelism::Sequential,
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let table = tiny_table();
        let file = to_file(&table, BTreeMap::new()).unwrap();
        let text = render(&file);
        let reparsed = parse(&text).unwrap();
        assert_eq!(render(&reparsed), text);
        let back = from_file(&reparsed).unwrap();
        let again = render(&to_file(&back, BTreeMap::new()).unwrap());
        assert_eq!(again, text);
    }

    #[test]
    fn parallel_build_is_deterministic() {
        use vertexalg::par::Parallelism;
        let config = TableConfig {
            pair_cutoff: 3,
            weight_cutoff: 4,
            s_min: 0,
        };
        let a = build_table(config, SamplingPolicy::default(), Parallelism::Parallel).unwrap();
        let b = build_table(config, SamplingPolicy::default(), Parallelism::Parallel).unwrap();
        let c = build_table(config, SamplingPolicy::default(), Parallelism::Sequential).unwrap();
        let ra = render(&to_file(&a, BTreeMap::new()).unwrap());
        let rb = render(&to_file(&b, BTreeMap::new()).unwrap());
        let rc = render(&to_file(&c, BTreeMap::new()).unwrap());
        assert_eq!(ra, rb);
        assert_eq!(ra, rc);
    }

    #[test]
    fn corrupted_hash_is_rejected() {
        let table = tiny_table();
        let mut file = to_file(&table, BTreeMap::new()).unwrap();
        file.meta.hash = "0".repeat(64);
        assert!(from_file(&file).is_err());
    }

    #[test]
    fn wrong_schema_is_rejected() {
        let table = tiny_table();
        let mut file = to_file(&table, BTreeMap::new()).unwrap();
        file.schema = "something/else".into();
        assert!(from_file(&file).is_err());
    }

    #[test]
    fn rational_strings() {
        assert_eq!(rational_from_string("-3/4").unwrap(), tests_q(-3, 4));
        assert_eq!(rational_to_string(&tests_q(5, 1)), "5");
        assert_eq!(rational_to_string(&tests_q(-3, 4)), "-3/4");
    }

    pub(super) fn tests_q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }
}
