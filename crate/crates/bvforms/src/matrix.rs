//! Sparse matrices over the rationals with deterministic exact elimination.

use std::collections::BTreeMap;

use num::{One, Zero};

use crate::scalar::Scalar;

/// Entries are stored only when nonzero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = SparseMatrix::new(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, row: usize, col: usize, value: Scalar) {
        assert!(row < self.rows && col < self.cols, "index out of range");
        if value.is_zero() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), value);
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Scalar {
        self.entries.get(&(row, col)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Scalar)> {
        self.entries.iter()
    }

    /// Rank and a kernel basis, by Gauss-Jordan elimination with the
    /// first-nonzero pivot rule. The pivot choice is position-only, so the
    /// reduced form and the kernel basis are reproducible; arithmetic is
    /// exact and every intermediate is renormalized to lowest terms.
    pub fn rank_kernel(&self) -> (usize, Vec<Vec<Scalar>>) {
        let mut a: Vec<Vec<Scalar>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j)).collect())
            .collect();
        let mut pivot_cols: Vec<usize> = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            // First row at or below the frontier with a nonzero entry.
            let Some(pivot) = (row..self.rows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(row, pivot);
            let inv = Scalar::one() / a[row][col].clone();
            for e in a[row][col..].iter_mut() {
                *e *= &inv;
            }
            let lead = a[row].clone();
            for (r, other) in a.iter_mut().enumerate() {
                if r != row && !other[col].is_zero() {
                    let factor = other[col].clone();
                    for (e, le) in other[col..].iter_mut().zip(&lead[col..]) {
                        *e -= &factor * le;
                    }
                }
            }
            pivot_cols.push(col);
            row += 1;
            if row == self.rows {
                break;
            }
        }
        let rank = pivot_cols.len();
        let mut kernel = Vec::new();
        let pivot_set: std::collections::BTreeSet<usize> = pivot_cols.iter().copied().collect();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![Scalar::zero(); self.cols];
            v[free] = Scalar::one();
            for (r, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -a[r][free].clone();
            }
            kernel.push(v);
        }
        (rank, kernel)
    }

    pub fn rank(&self) -> usize {
        self.rank_kernel().0
    }
}
