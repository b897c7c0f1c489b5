//! Dense matrices over a [`Field`] with Gaussian elimination.

use crate::galois::{Elem, Field};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<Elem>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Matrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            m.row_mut(i).copy_from_slice(r);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [Elem] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (i, &c) in cols.iter().enumerate() {
                m.set(r, i, self.get(r, c));
            }
        }
        m
    }

    /// Row vector times matrix: `v * self`.
    pub fn left_mul(&self, field: &Field, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![0; self.cols];
        for (r, &coef) in v.iter().enumerate() {
            if coef != 0 {
                axpy(field, &mut out, coef, self.row(r));
            }
        }
        out
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self, field: &Field) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            self.swap_rows(row, p);
            let inv = field.inv(self.get(row, col)).expect("pivot is nonzero");
            for v in self.row_mut(row) {
                *v = field.mul(*v, inv);
            }
            let pivot_row = self.row(row).to_vec();
            for r in 0..self.rows {
                if r != row {
                    let f = self.get(r, col);
                    if f != 0 {
                        axpy(field, self.row_mut(r), field.neg(f), &pivot_row);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    pub fn rank(&self, field: &Field) -> usize {
        self.clone().rref(field).len()
    }

    /// Basis of `{x : self * x = 0}`.
    pub fn nullspace(&self, field: &Field) -> Vec<Vec<Elem>> {
        let mut m = self.clone();
        let pivots = m.rref(field);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut x = vec![0; self.cols];
                x[fc] = 1;
                for (i, &pc) in pivots.iter().enumerate() {
                    x[pc] = field.neg(m.get(i, fc));
                }
                x
            })
            .collect()
    }

    /// Basis of `{v : v * self = 0}`.
    pub fn left_nullspace(&self, field: &Field) -> Vec<Vec<Elem>> {
        self.transpose().nullspace(field)
    }

    /// Solves `self * x = b`.
    pub fn solve(&self, field: &Field, b: &[Elem]) -> Solution {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for (r, &br) in b.iter().enumerate() {
            aug.row_mut(r)[..self.cols].copy_from_slice(self.row(r));
            aug.set(r, self.cols, br);
        }
        let pivots = aug.rref(field);
        if pivots.last() == Some(&self.cols) {
            return Solution::Inconsistent;
        }
        let rank = pivots.len();
        let mut x = vec![0; self.cols];
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.get(i, self.cols);
        }
        if rank < self.cols {
            Solution::Underdetermined {
                rank,
                particular: x,
            }
        } else {
            Solution::Unique(x)
        }
    }
}

/// Outcome of [`Matrix::solve`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<Elem>),
    Underdetermined { rank: usize, particular: Vec<Elem> },
    Inconsistent,
}

/// `y += a * x`
#[inline]
pub fn axpy(field: &Field, y: &mut [Elem], a: Elem, x: &[Elem]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = field.add(*yi, field.mul(a, xi));
    }
}

/// Number of nonzero symbols.
pub fn weight(v: &[Elem]) -> usize {
    v.iter().filter(|&&x| x != 0).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_nullspace() {
        let f = Field::binary(3).unwrap();
        let m = Matrix::from_rows(&[vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]);
        let r = m.rank(&f);
        let ns = m.nullspace(&f);
        assert_eq!(r + ns.len(), 3);
        for x in ns {
            let t = m.transpose();
            assert!(t.left_mul(&f, &x).iter().all(|&v| v == 0));
        }
    }

    #[test]
    fn solve_unique_and_inconsistent() {
        let f = Field::binary(4).unwrap();
        let m = Matrix::from_rows(&[vec![1, 1], vec![1, 2], vec![1, 3]]);
        let x = vec![7, 9];
        let b = m.transpose().left_mul(&f, &x);
        assert_eq!(m.solve(&f, &b), Solution::Unique(x));
        let mut bad = b.clone();
        bad[2] ^= 1;
        assert_eq!(m.solve(&f, &bad), Solution::Inconsistent);
    }
}
