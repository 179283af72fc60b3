//! Banded LU with partial pivoting, used for inverse iteration.

use super::matrix::ComplexMatrix;
use crate::special::C64;

/// LU factors of `M - shift·I` in band storage.
///
/// Row `r` keeps columns `r - kl ..= r + kl + ku`; pivoting can push the upper
/// factor out to `kl + ku` superdiagonals.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    u: Vec<C64>,
    mult: Vec<C64>,
    piv: Vec<usize>,
}

impl BandLu {
    pub fn factor(m: &ComplexMatrix, shift: C64) -> Self {
        let (kl, ku) = m.bandwidths();
        Self::factor_with_bandwidths(m, shift, kl, ku)
    }

    pub fn factor_with_bandwidths(m: &ComplexMatrix, shift: C64, kl: usize, ku: usize) -> Self {
        let n = m.dim();
        let width = 2 * kl + ku + 1;
        let zero = C64::new(0.0, 0.0);
        let mut lu =
            Self { n, kl, ku, width, u: vec![zero; n * width], mult: vec![zero; n * kl.max(1)], piv: vec![0; n] };
        for i in 0..n {
            let lo = i.saturating_sub(kl);
            let hi = (i + ku).min(n - 1);
            for j in lo..=hi {
                let mut v = m[(i, j)];
                if i == j {
                    v -= shift;
                }
                *lu.at(i, j) = v;
            }
        }
        let tiny = f64::EPSILON * m.frobenius_norm().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = lu.get(k, k).norm();
            for r in k + 1..=last {
                let v = lu.get(r, k).norm();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            lu.piv[k] = p;
            let cmax = (k + kl + ku).min(n - 1);
            if p != k {
                for j in k..=cmax {
                    let a = lu.get(k, j);
                    let b = lu.get(p, j);
                    *lu.at(k, j) = b;
                    *lu.at(p, j) = a;
                }
            }
            if lu.get(k, k).norm() < tiny {
                // exactly singular shift: nudge the pivot so the solve blows up
                // along the wanted direction instead of dividing by zero
                *lu.at(k, k) = C64::new(tiny, 0.0);
            }
            let pivot = lu.get(k, k);
            for r in k + 1..=last {
                let f = lu.get(r, k) / pivot;
                lu.mult[k * kl.max(1) + (r - k - 1)] = f;
                if f == zero {
                    continue;
                }
                for j in k + 1..=cmax {
                    let ukj = lu.get(k, j);
                    *lu.at(r, j) -= f * ukj;
                }
            }
        }
        lu
    }

    fn slot(&self, r: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= r && j + self.kl - r < self.width);
        r * self.width + (j + self.kl - r)
    }

    fn get(&self, r: usize, j: usize) -> C64 {
        self.u[self.slot(r, j)]
    }

    fn at(&mut self, r: usize, j: usize) -> &mut C64 {
        let s = self.slot(r, j);
        &mut self.u[s]
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let kl = self.kl;
        let mut x = b.to_vec();
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                x.swap(k, p);
            }
            let last = (k + kl).min(n - 1);
            for r in k + 1..=last {
                let f = self.mult[k * kl.max(1) + (r - k - 1)];
                let xk = x[k];
                x[r] -= f * xk;
            }
        }
        for k in (0..n).rev() {
            let cmax = (k + kl + self.ku).min(n - 1);
            let mut s = x[k];
            for (j, xj) in x.iter().enumerate().take(cmax + 1).skip(k + 1) {
                s -= self.get(k, j) * xj;
            }
            x[k] = s / self.get(k, k);
        }
        x
    }
}
