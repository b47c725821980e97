//! Small dense kernels and a compressed sparse row matrix.
//!
//! The dense routines target the tiny systems that appear when setting up
//! bases and temporal projections (Vandermonde and temporal mass matrices,
//! dimension ≤ ~20). The sparse type is the assembly target for slab systems;
//! factorization happens downstream.

use alloc::vec;
use alloc::vec::Vec;

/// Row-major dense matrix, sized for basis/Vandermonde work.
#[derive(Clone, Debug)]
pub struct DenseMat {
    pub n_rows: usize,
    pub n_cols: usize,
    pub data: Vec<f64>,
}

impl DenseMat {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n_cols + j] = v;
    }

    /// Inverse by Gauss–Jordan with partial pivoting. Panics on non-square
    /// input; returns `None` if a pivot falls below `1e-14` of the row scale.
    pub fn inverse(&self) -> Option<DenseMat> {
        assert_eq!(self.n_rows, self.n_cols, "inverse of non-square matrix");
        let n = self.n_rows;
        let mut a = self.data.clone();
        let mut inv = DenseMat::zeros(n, n);
        for i in 0..n {
            inv.set(i, i, 1.0);
        }
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].abs();
            for r in (col + 1)..n {
                let v = a[r * n + col].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best < 1e-14 {
                return None;
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                    inv.data.swap(col * n + j, piv * n + j);
                }
            }
            let d = a[col * n + col];
            for j in 0..n {
                a[col * n + j] /= d;
                inv.data[col * n + j] /= d;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] -= f * a[col * n + j];
                    inv.data[r * n + j] -= f * inv.data[col * n + j];
                }
            }
        }
        Some(inv)
    }

    /// Solve `A x = b` for a handful of right-hand sides via the inverse.
    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        let inv = self.inverse()?;
        let n = self.n_rows;
        let mut x = vec![0.0; n];
        for i in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                s += inv.get(i, j) * b[j];
            }
            x[i] = s;
        }
        Some(x)
    }
}

/// Unsorted coordinate-format accumulator for sparse assembly.
#[derive(Clone, Debug, Default)]
pub struct Triplets {
    pub dim: usize,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl Triplets {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            rows: Vec::new(),
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, val: f64) {
        if val != 0.0 {
            self.rows.push(row);
            self.cols.push(col);
            self.vals.push(val);
        }
    }

    pub fn append(&mut self, other: &Triplets) {
        debug_assert_eq!(self.dim, other.dim);
        self.rows.extend_from_slice(&other.rows);
        self.cols.extend_from_slice(&other.cols);
        self.vals.extend_from_slice(&other.vals);
    }

    /// Compress to CSR, summing duplicates. Entries are combined in a fixed
    /// (row, col, insertion) order so the result does not depend on float
    /// addition reordering.
    pub fn to_csr(&self) -> CsrMatrix {
        let n = self.dim;
        let nnz = self.vals.len();
        let mut order: Vec<usize> = (0..nnz).collect();
        order.sort_by(|&a, &b| {
            (self.rows[a], self.cols[a], a).cmp(&(self.rows[b], self.cols[b], b))
        });
        let mut entry_rows = Vec::with_capacity(nnz);
        let mut col_idx = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        let mut last = None;
        for &idx in &order {
            let (r, c, v) = (self.rows[idx], self.cols[idx], self.vals[idx]);
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                entry_rows.push(r);
                col_idx.push(c);
                vals.push(v);
                last = Some((r, c));
            }
        }
        let mut row_ptr = vec![0usize; n + 1];
        for &r in &entry_rows {
            row_ptr[r + 1] += 1;
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        CsrMatrix {
            n,
            row_ptr,
            col_idx,
            vals,
        }
    }
}

/// Square CSR matrix.
#[derive(Clone, Debug)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for r in 0..self.n {
            let mut s = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                s += self.vals[k] * x[self.col_idx[k]];
            }
            y[r] = s;
        }
    }

    /// xᵀ A x without allocating.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for r in 0..self.n {
            let mut s = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                s += self.vals[k] * x[self.col_idx[k]];
            }
            total += x[r] * s;
        }
        total
    }

    /// xᵀ A y.
    pub fn bilinear_form(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut total = 0.0;
        for r in 0..self.n {
            let mut s = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                s += self.vals[k] * y[self.col_idx[k]];
            }
            total += x[r] * s;
        }
        total
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            if self.col_idx[k] == j {
                return self.vals[k];
            }
        }
        0.0
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    crate::math::sqrt(dot(a, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_inverse_roundtrip() {
        let mut a = DenseMat::zeros(3, 3);
        let entries = [[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]];
        for i in 0..3 {
            for j in 0..3 {
                a.set(i, j, entries[i][j]);
            }
        }
        let inv = a.inverse().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += a.get(i, k) * inv.get(k, j);
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((s - expect).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn singular_dense_is_rejected() {
        let mut a = DenseMat::zeros(2, 2);
        a.set(0, 0, 1.0);
        a.set(0, 1, 2.0);
        a.set(1, 0, 2.0);
        a.set(1, 1, 4.0);
        assert!(a.inverse().is_none());
    }

    #[test]
    fn csr_sums_duplicates_and_multiplies() {
        let mut t = Triplets::new(3);
        t.push(0, 0, 1.0);
        t.push(0, 0, 2.0);
        t.push(2, 1, 5.0);
        t.push(1, 2, -1.0);
        let m = t.to_csr();
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.get(0, 0), 3.0);
        let x = [1.0, 2.0, 3.0];
        let mut y = [0.0; 3];
        m.matvec(&x, &mut y);
        assert_eq!(y, [3.0, -3.0, 10.0]);
        assert_eq!(m.quadratic_form(&x), 3.0 - 6.0 + 30.0);
    }
}
