//! Complex-symmetric banded matrices: reduction to tridiagonal form with
//! complex-orthogonal rotations, then implicit QL on the tridiagonal.
//!
//! Complex-orthogonal transforms are not unitary; when a rotation would be
//! badly conditioned the caller falls back to the general QR path.

use super::matrix::ComplexMatrix;
use super::NumericsError;
use crate::special::C64;

/// Largest `|c|` or `|s|` tolerated in a rotation before declaring breakdown.
const MAX_ROTATION_GAIN: f64 = 1e3;

fn rotation(x: C64, y: C64) -> Option<(C64, C64, C64)> {
    let rho = (x * x + y * y).sqrt();
    let size = x.norm() + y.norm();
    if rho.norm() <= 1e-8 * size {
        return None;
    }
    let c = x / rho;
    let s = y / rho;
    if c.norm() > MAX_ROTATION_GAIN || s.norm() > MAX_ROTATION_GAIN {
        return None;
    }
    Some((c, s, rho))
}

/// Band storage of a complex-symmetric matrix: `a[i][k] = M[i + k][i]` for
/// `k <= width`, with room for one bulge below the band.
struct Band {
    n: usize,
    b: usize,
    width: usize,
    a: Vec<C64>,
}

impl Band {
    fn from_matrix(m: &ComplexMatrix, b: usize) -> Self {
        let n = m.dim();
        let width = b + 1;
        let mut a = vec![C64::new(0.0, 0.0); n * (width + 1)];
        for i in 0..n {
            for k in 0..=b.min(n - 1 - i) {
                a[i * (width + 1) + k] = m[(i + k, i)];
            }
        }
        Self { n, b, width, a }
    }

    // lower-triangle access, (r, c) with r >= c
    fn get(&self, r: usize, c: usize) -> C64 {
        let (r, c) = if r >= c { (r, c) } else { (c, r) };
        let k = r - c;
        if k > self.width || r >= self.n {
            C64::new(0.0, 0.0)
        } else {
            self.a[c * (self.width + 1) + k]
        }
    }

    fn set(&mut self, r: usize, c: usize, v: C64) {
        let (r, c) = if r >= c { (r, c) } else { (c, r) };
        let k = r - c;
        debug_assert!(k <= self.width);
        self.a[c * (self.width + 1) + k] = v;
    }

    /// Similarity with the rotation `[[c, s], [-s, c]]` acting on indices
    /// `p` and `p + 1`.
    fn rotate(&mut self, p: usize, c: C64, s: C64) {
        let q = p + 1;
        let lo = p.saturating_sub(self.width);
        let hi = (q + self.width).min(self.n - 1);
        let app = self.get(p, p);
        let apq = self.get(p, q);
        let aqq = self.get(q, q);
        for j in lo..=hi {
            if j == p || j == q {
                continue;
            }
            let ap = self.get(p, j);
            let aq = self.get(q, j);
            if ap == C64::new(0.0, 0.0) && aq == C64::new(0.0, 0.0) {
                continue;
            }
            let np = c * ap + s * aq;
            let nq = -s * ap + c * aq;
            let kp = j.abs_diff(p);
            let kq = j.abs_diff(q);
            if kp <= self.width {
                self.set(p, j, np);
            }
            if kq <= self.width {
                self.set(q, j, nq);
            }
        }
        let cc = c * c;
        let ss = s * s;
        let cs = c * s;
        self.set(p, p, cc * app + 2.0 * cs * apq + ss * aqq);
        self.set(q, q, ss * app - 2.0 * cs * apq + cc * aqq);
        self.set(p, q, (cc - ss) * apq + cs * (aqq - app));
    }
}

/// Diagonal and off-diagonal of a tridiagonal complex-symmetric matrix
/// similar to `m`, which must be complex symmetric with bandwidth `b`.
pub(crate) fn reduce_to_tridiagonal(m: &ComplexMatrix, b: usize) -> Result<(Vec<C64>, Vec<C64>), NumericsError> {
    let n = m.dim();
    let mut band = Band::from_matrix(m, b);
    if b > 1 {
        for k in 0..n.saturating_sub(2) {
            for i in (k + 2..=(k + b).min(n - 1)).rev() {
                // annihilate (i, k) with the plane (i - 1, i), then chase the
                // bulge that appears b rows further down
                let (mut row, mut col) = (i, k);
                loop {
                    let x = band.get(row - 1, col);
                    let y = band.get(row, col);
                    if y != C64::new(0.0, 0.0) {
                        let (c, s, rho) = rotation(x, y).ok_or(NumericsError::Breakdown(k))?;
                        band.rotate(row - 1, c, s);
                        band.set(row - 1, col, rho);
                        band.set(row, col, C64::new(0.0, 0.0));
                    }
                    let next = row + band.b;
                    if next >= n {
                        break;
                    }
                    col = row - 1;
                    row = next;
                    if band.get(row, col) == C64::new(0.0, 0.0) {
                        break;
                    }
                }
            }
        }
    }
    let d = (0..n).map(|i| band.get(i, i)).collect();
    let e = (0..n.saturating_sub(1)).map(|i| band.get(i + 1, i)).collect();
    Ok((d, e))
}

/// Eigenvalues of the complex-symmetric tridiagonal matrix `(d, e)` by the
/// implicit QL iteration. Returns the iteration count.
pub(crate) fn tridiagonal_ql(d: &mut [C64], e: &[C64], tol: f64, max_iter: usize) -> Result<usize, NumericsError> {
    let n = d.len();
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let mut e: Vec<C64> = e.iter().copied().chain(std::iter::once(zero)).collect();
    let mut total = 0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].norm() + d[m + 1].norm();
                if e[m].norm() <= tol * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            total += 1;
            if iter > max_iter {
                return Err(NumericsError::Breakdown(l));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = (g * g + one).sqrt();
            let denom = if (g + r).norm() >= (g - r).norm() { g + r } else { g - r };
            g = d[m] - d[l] + e[l] / denom;
            let (mut s, mut c, mut p) = (one, one, zero);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let bb = c * e[i];
                r = (f * f + g * g).sqrt();
                e[i + 1] = r;
                let size = f.norm() + g.norm();
                if r.norm() <= 1e-8 * size {
                    if size == 0.0 {
                        d[i + 1] -= p;
                        e[m] = zero;
                        underflow = true;
                        break;
                    }
                    return Err(NumericsError::Breakdown(i));
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * bb;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - bb;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = zero;
        }
    }
    Ok(total)
}
