//! Exact linear algebra for the basis-rewriting systems.
//!
//! The systems that arise here are tall and thin: a few thousand Fock
//! coordinates against a few dozen basis monomials, with entries polynomial
//! in one grading variable. They are solved layer by layer: the degree-zero
//! slice of the matrix has full column rank (its columns are the classical
//! realizations of independent basis monomials), so each graded slice of the
//! solution is obtained from one rational least-squares solve against the
//! same Gram factorization, and the full residual is checked exactly at the
//! end. This keeps all arithmetic over plain rationals and avoids the degree
//! blow-up of elimination over the polynomial ring.

use crate::coeff::{q, Rational};
use num::traits::Zero;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is rank deficient: {0}")]
    RankDeficient(String),
    #[error("inconsistent system: {0}")]
    Inconsistent(String),
    #[error("layered solve did not terminate within {0} layers")]
    NoTermination(usize),
}

/// Sparse column-major matrix over the rationals.
#[derive(Clone, Debug)]
pub struct SparseCols {
    pub nrows: usize,
    /// Each column is a sorted list of `(row, value)` with nonzero values.
    pub cols: Vec<Vec<(usize, Rational)>>,
}

impl SparseCols {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        SparseCols {
            nrows,
            cols: vec![Vec::new(); ncols],
        }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    pub fn push_entry(&mut self, row: usize, col: usize, value: Rational) {
        if !value.is_zero() {
            debug_assert!(row < self.nrows);
            self.cols[col].push((row, value));
        }
    }

    /// Restores the sorted-row invariant `dot` relies on.
    pub fn sort_columns(&mut self) {
        for col in &mut self.cols {
            col.sort_by_key(|(r, _)| *r);
        }
    }

    fn dot(a: &[(usize, Rational)], b: &[(usize, Rational)]) -> Rational {
        let mut acc = q(0);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += &a[i].1 * &b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// `A^T r` for a dense vector `r`.
    pub fn transpose_apply(&self, r: &[Rational]) -> Vec<Rational> {
        self.cols
            .iter()
            .map(|col| {
                let mut acc = q(0);
                for (row, v) in col {
                    if !r[*row].is_zero() {
                        acc += v * &r[*row];
                    }
                }
                acc
            })
            .collect()
    }

    /// `A x` for a dense vector `x`, returned dense.
    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        let mut out = vec![q(0); self.nrows];
        for (col, xv) in self.cols.iter().zip(x.iter()) {
            if xv.is_zero() {
                continue;
            }
            for (row, v) in col {
                out[*row] += v * xv;
            }
        }
        out
    }

    /// Dense Gram matrix `A^T A`.
    pub fn gram(&self) -> Vec<Vec<Rational>> {
        let n = self.ncols();
        let mut g = vec![vec![q(0); n]; n];
        for i in 0..n {
            for j in i..n {
                let d = Self::dot(&self.cols[i], &self.cols[j]);
                g[i][j] = d.clone();
                g[j][i] = d;
            }
        }
        g
    }
}

/// Dense LU factorization with partial pivoting over the rationals.
#[derive(Clone, Debug)]
pub struct DenseLu {
    n: usize,
    lu: Vec<Vec<Rational>>,
    perm: Vec<usize>,
}

impl DenseLu {
    pub fn factor(mut m: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        let n = m.len();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let pivot_row = (k..n).find(|&r| !m[r][k].is_zero()).ok_or_else(|| {
                LinalgError::RankDeficient(format!("no pivot in column {k} of {n}x{n} system"))
            })?;
            m.swap(k, pivot_row);
            perm.swap(k, pivot_row);
            let pivot = m[k][k].clone();
            for r in (k + 1)..n {
                if m[r][k].is_zero() {
                    continue;
                }
                let factor = &m[r][k] / &pivot;
                m[r][k] = factor.clone();
                for c in (k + 1)..n {
                    let delta = &factor * &m[k][c];
                    m[r][c] -= delta;
                }
            }
        }
        Ok(DenseLu { n, lu: m, perm })
    }

    pub fn solve(&self, rhs: &[Rational]) -> Vec<Rational> {
        assert_eq!(rhs.len(), self.n);
        let mut y: Vec<Rational> = self.perm.iter().map(|&p| rhs[p].clone()).collect();
        for r in 1..self.n {
            for c in 0..r {
                if !self.lu[r][c].is_zero() && !y[c].is_zero() {
                    let delta = &self.lu[r][c] * &y[c];
                    y[r] -= delta;
                }
            }
        }
        for r in (0..self.n).rev() {
            for c in (r + 1)..self.n {
                if !self.lu[r][c].is_zero() && !y[c].is_zero() {
                    let delta = &self.lu[r][c] * &y[c];
                    y[r] -= delta;
                }
            }
            y[r] = &y[r] / &self.lu[r][r];
        }
        y
    }
}

/// Least-squares solver against a fixed full-column-rank matrix.
pub struct GramSolver {
    a0: SparseCols,
    lu: DenseLu,
}

impl GramSolver {
    pub fn new(mut a0: SparseCols) -> Result<Self, LinalgError> {
        a0.sort_columns();
        let lu = DenseLu::factor(a0.gram()).map_err(|_| {
            LinalgError::RankDeficient(format!(
                "degree-zero slice has dependent columns ({} rows, {} cols)",
                a0.nrows,
                a0.ncols()
            ))
        })?;
        Ok(GramSolver { a0, lu })
    }

    pub fn ncols(&self) -> usize {
        self.a0.ncols()
    }

    /// The unique least-squares solution of `A0 x = rhs`; exact solution when
    /// the system is consistent (callers verify the residual).
    pub fn solve(&self, rhs: &[Rational]) -> Vec<Rational> {
        self.lu.solve(&self.a0.transpose_apply(rhs))
    }
}

/// A tall system whose matrix is graded by powers of one variable:
/// `A = A_0 + z A_1 + z^2 A_2 + ...`.
pub struct LayeredSystem {
    slices: Vec<SparseCols>,
    gram: GramSolver,
    nrows: usize,
}

impl LayeredSystem {
    /// `slices[k]` is the coefficient matrix of `z^k`; `slices[0]` must have
    /// full column rank.
    pub fn new(slices: Vec<SparseCols>) -> Result<Self, LinalgError> {
        assert!(!slices.is_empty());
        let nrows = slices[0].nrows;
        let gram = GramSolver::new(slices[0].clone())?;
        Ok(LayeredSystem {
            slices,
            gram,
            nrows,
        })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.gram.ncols()
    }

    /// Solves `A x = rhs` where `rhs` is graded by powers of `z`
    /// (`rhs_slices[k]` is the `z^k` part, dense over rows) and the solution
    /// is a polynomial in `z`. Returns the solution slices; errors if no
    /// polynomial solution exists.
    pub fn solve(&self, rhs_slices: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>, LinalgError> {
        let max_layers = rhs_slices.len() + self.slices.len() + 32;
        // residual[k] = z^k slice of rhs - A * (partial solution)
        let mut residual: Vec<Vec<Rational>> = rhs_slices.to_vec();
        let mut x_layers: Vec<Vec<Rational>> = Vec::new();
        let mut k = 0;
        loop {
            while residual.len() <= k {
                residual.push(vec![q(0); self.nrows]);
            }
            let all_zero_from_k = residual[k..]
                .iter()
                .all(|slice| slice.iter().all(|v| v.is_zero()));
            if all_zero_from_k {
                return Ok(x_layers);
            }
            if k >= max_layers {
                return Err(LinalgError::NoTermination(max_layers));
            }
            let xk = self.gram.solve(&residual[k]);
            // Subtract A * z^k x_k from the residual.
            for (t, slice) in self.slices.iter().enumerate() {
                let contribution = slice.apply(&xk);
                let target = k + t;
                while residual.len() <= target {
                    residual.push(vec![q(0); self.nrows]);
                }
                for (r, v) in contribution.into_iter().enumerate() {
                    if !v.is_zero() {
                        residual[target][r] -= v;
                    }
                }
            }
            if residual[k].iter().any(|v| !v.is_zero()) {
                let bad: Vec<usize> = residual[k]
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(r, _)| r)
                    .take(4)
                    .collect();
                return Err(LinalgError::Inconsistent(format!(
                    "layer {k} leaves a nonzero residual in rows {bad:?}"
                )));
            }
            x_layers.push(xk);
            k += 1;
        }
    }
}

/// Column rank of a sparse rational matrix (exact elimination on a dense copy).
pub fn column_rank(m: &SparseCols) -> usize {
    let mut rows: Vec<Vec<Rational>> = vec![vec![q(0); m.ncols()]; m.nrows];
    for (c, col) in m.cols.iter().enumerate() {
        for (r, v) in col {
            rows[*r][c] = v.clone();
        }
    }
    let mut rank = 0;
    for c in 0..m.ncols() {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][c].clone();
        for r in (rank + 1)..rows.len() {
            if rows[r][c].is_zero() {
                continue;
            }
            let f = &rows[r][c] / &pivot;
            for cc in c..m.ncols() {
                let delta = &f * &rows[rank][cc];
                rows[r][cc] -= delta;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::qr;

    #[test]
    fn dense_lu_solves() {
        let m = vec![
            vec![q(2), q(1), q(-1)],
            vec![q(-3), q(-1), q(2)],
            vec![q(-2), q(1), q(2)],
        ];
        let lu = DenseLu::factor(m).unwrap();
        let x = lu.solve(&[q(8), q(-11), q(-3)]);
        assert_eq!(x, vec![q(2), q(3), q(-1)]);
    }

    #[test]
    fn dense_lu_detects_singular() {
        let m = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert!(DenseLu::factor(m).is_err());
    }

    #[test]
    fn gram_solver_overdetermined() {
        // columns (1,1,1) and (0,1,2); rhs = 2*c0 - c1
        let mut a = SparseCols::new(3, 2);
        for r in 0..3 {
            a.push_entry(r, 0, q(1));
        }
        a.push_entry(1, 1, q(1));
        a.push_entry(2, 1, q(2));
        let solver = GramSolver::new(a).unwrap();
        let x = solver.solve(&[q(2), q(1), q(0)]);
        assert_eq!(x, vec![q(2), q(-1)]);
    }

    #[test]
    fn layered_solve_recovers_polynomial_solution() {
        // A = A0 + z A1, x = (1 - z, 2): A0 = [[1,0],[0,1],[1,1]], A1 = [[0,1],[1,0],[0,0]]
        let mut a0 = SparseCols::new(3, 2);
        a0.push_entry(0, 0, q(1));
        a0.push_entry(1, 1, q(1));
        a0.push_entry(2, 0, q(1));
        a0.push_entry(2, 1, q(1));
        let mut a1 = SparseCols::new(3, 2);
        a1.push_entry(0, 1, q(1));
        a1.push_entry(1, 0, q(1));
        let sys = LayeredSystem::new(vec![a0, a1]).unwrap();
        // rhs = A x with x0 = (1,2), x1 = (-1,0):
        // layer0: A0 x0 = (1,2,3); layer1: A0 x1 + A1 x0 = (-1+2, 0+1, -1) = (1,1,-1)
        // layer2: A1 x1 = (0,-1,0)
        let rhs = vec![
            vec![q(1), q(2), q(3)],
            vec![q(1), q(1), q(-1)],
            vec![q(0), q(-1), q(0)],
        ];
        let x = sys.solve(&rhs).unwrap();
        assert_eq!(x.len(), 2);
        assert_eq!(x[0], vec![q(1), q(2)]);
        assert_eq!(x[1], vec![q(-1), q(0)]);
    }

    #[test]
    fn layered_solve_flags_inconsistency() {
        let mut a0 = SparseCols::new(2, 1);
        a0.push_entry(0, 0, q(1));
        a0.push_entry(1, 0, q(1));
        let sys = LayeredSystem::new(vec![a0]).unwrap();
        let err = sys.solve(&[vec![q(1), q(2)]]).unwrap_err();
        assert!(matches!(err, LinalgError::Inconsistent(_)));
    }

    #[test]
    fn rank_computation() {
        let mut a = SparseCols::new(3, 3);
        a.push_entry(0, 0, q(1));
        a.push_entry(1, 0, q(2));
        a.push_entry(0, 1, qr(1, 2));
        a.push_entry(1, 1, q(1));
        a.push_entry(2, 2, q(5));
        // col1 = col0 / 2 => rank 2
        assert_eq!(column_rank(&a), 2);
    }
}
