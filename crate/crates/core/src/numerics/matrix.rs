use std::ops::{Index, IndexMut};

use crate::special::C64;

/// Dense square complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn from_diag(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, z) in d.iter().enumerate() {
            m[(i, i)] = *z;
        }
        m
    }

    /// Row-major construction; `rows` must be square.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Self { n, data: rows.concat() }
    }

    /// Tridiagonal matrix from sub-, main and super-diagonal.
    pub fn tridiagonal(sub: &[C64], diag: &[C64], sup: &[C64]) -> Self {
        let n = diag.len();
        assert!(sub.len() + 1 == n && sup.len() + 1 == n, "inconsistent tridiagonal lengths");
        let mut m = Self::from_diag(diag);
        for i in 0..n - 1 {
            m[(i + 1, i)] = sub[i];
            m[(i, i + 1)] = sup[i];
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.n);
        let (lo, hi) = self.bandwidths();
        (0..self.n)
            .map(|i| {
                let start = i.saturating_sub(lo);
                let end = (i + hi + 1).min(self.n);
                (start..end).map(|j| self[(i, j)] * v[j]).sum()
            })
            .collect()
    }

    /// Lower and upper bandwidths: the largest `i - j` and `j - i` with a
    /// nonzero entry.
    pub fn bandwidths(&self) -> (usize, usize) {
        let mut lo = 0;
        let mut hi = 0;
        for i in 0..self.n {
            for j in 0..self.n {
                if self[(i, j)] != C64::new(0.0, 0.0) {
                    if i > j {
                        lo = lo.max(i - j);
                    } else {
                        hi = hi.max(j - i);
                    }
                }
            }
        }
        (lo, hi)
    }

    pub fn is_upper_hessenberg(&self) -> bool {
        self.bandwidths().0 <= 1
    }

    /// `M == M^T` entrywise (no conjugation).
    pub fn is_complex_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}
