//! Dense non-Hermitian eigensolver.
//!
//! The general path is Householder reduction to upper Hessenberg form
//! followed by single-shift complex QR with Wilkinson shifts. Complex
//! symmetric banded input (every discretized Hamiltonian here) takes a fast
//! path through a complex-orthogonal band reduction and tridiagonal QL, and
//! drops back to the general path if that breaks down. Eigenvectors are
//! computed on request by inverse iteration against the original matrix.

use serde::{Deserialize, Serialize};

use super::lu::BandLu;
use super::matrix::ComplexMatrix;
use super::symmetric;
use crate::special::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenMethod {
    /// Symmetric banded fast path when applicable, general QR otherwise.
    #[default]
    Auto,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    pub tol: f64,
    /// QR sweeps allowed per eigenvalue.
    pub max_iter: usize,
    pub method: EigenMethod,
    /// Widest band handled by the symmetric fast path.
    pub max_band: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { tol: f64::EPSILON, max_iter: 60, method: EigenMethod::Auto, max_band: 8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverPath {
    SymmetricBand,
    HessenbergQr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub eigenvalues: Vec<C64>,
    pub converged: Vec<bool>,
    pub iterations: usize,
    pub path: SolverPath,
    /// Per eigenvalue, filled by [`EigenResult::compute_eigenvectors`].
    pub eigenvectors: Option<Vec<Option<Vec<C64>>>>,
    /// `‖Mv − λv‖ / (‖M‖_F ‖v‖)` for every computed eigenvector.
    pub residuals: Option<Vec<Option<f64>>>,
}

impl EigenResult {
    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }

    /// Inverse iteration for every eigenvalue accepted by `select`.
    ///
    /// Pairs whose residual is above rounding level get one Rayleigh-quotient
    /// polish, which also updates the stored eigenvalue. The banded symmetric
    /// path uses non-unitary rotations and needs this to be backward stable.
    pub fn compute_eigenvectors(&mut self, m: &ComplexMatrix, mut select: impl FnMut(C64) -> bool) {
        let n = self.eigenvalues.len();
        let mut vecs = self.eigenvectors.take().unwrap_or_else(|| vec![None; n]);
        let mut res = self.residuals.take().unwrap_or_else(|| vec![None; n]);
        let bands = m.bandwidths();
        let norm = m.frobenius_norm();
        for i in 0..n {
            let mut lambda = self.eigenvalues[i];
            if vecs[i].is_some() || !select(lambda) {
                continue;
            }
            let mut v = inverse_iteration(m, lambda, bands);
            let mut r = relative_residual(m, lambda, &v, norm);
            if r > POLISH_ABOVE {
                if let Some(l) = rayleigh_quotient(m, &v) {
                    // a polished value must stay within the residual's reach
                    if (l - lambda).norm() <= 10.0 * r * norm {
                        let w = inverse_iteration(m, l, bands);
                        let rw = relative_residual(m, l, &w, norm);
                        if rw < r {
                            (lambda, v, r) = (l, w, rw);
                        }
                    }
                }
            }
            self.eigenvalues[i] = lambda;
            res[i] = Some(r);
            vecs[i] = Some(v);
        }
        self.eigenvectors = Some(vecs);
        self.residuals = Some(res);
    }

    pub fn compute_all_eigenvectors(&mut self, m: &ComplexMatrix) {
        self.compute_eigenvectors(m, |_| true);
    }

    pub fn eigenvector(&self, i: usize) -> Option<&[C64]> {
        self.eigenvectors.as_ref()?.get(i)?.as_deref()
    }

    pub fn max_residual(&self) -> Option<f64> {
        let r = self.residuals.as_ref()?;
        r.iter().flatten().copied().reduce(f64::max)
    }
}

/// `‖Mv − λv‖ / (‖M‖_F ‖v‖)`.
pub fn relative_residual(m: &ComplexMatrix, lambda: C64, v: &[C64], m_norm: f64) -> f64 {
    let mv = m.mul_vec(v);
    let r: f64 = mv.iter().zip(v).map(|(a, b)| (a - lambda * b).norm_sqr()).sum::<f64>().sqrt();
    let vn: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    r / (m_norm.max(f64::MIN_POSITIVE) * vn.max(f64::MIN_POSITIVE))
}

/// Relative residual above which a computed pair is polished.
const POLISH_ABOVE: f64 = 10.0 * f64::EPSILON;

/// `vᵀMv / vᵀv` (stationary for complex symmetric `M`), falling back to
/// `v*Mv / v*v` when `vᵀv` is nearly zero.
fn rayleigh_quotient(m: &ComplexMatrix, v: &[C64]) -> Option<C64> {
    let mv = m.mul_vec(v);
    let vv: C64 = v.iter().map(|a| a * a).sum();
    let vn: f64 = v.iter().map(|a| a.norm_sqr()).sum();
    let q = if m.is_complex_symmetric() && vv.norm() > 1e-3 * vn {
        v.iter().zip(&mv).map(|(a, b)| a * b).sum::<C64>() / vv
    } else {
        v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum::<C64>() / vn
    };
    (q.re.is_finite() && q.im.is_finite()).then_some(q)
}

fn normalize(v: &mut [C64]) {
    let nrm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if nrm > 0.0 && nrm.is_finite() {
        v.iter_mut().for_each(|z| *z /= nrm);
    }
}

fn inverse_iteration(m: &ComplexMatrix, lambda: C64, (kl, ku): (usize, usize)) -> Vec<C64> {
    let n = m.dim();
    let lu = BandLu::factor_with_bandwidths(m, lambda, kl, ku);
    // deterministic start with no special alignment to any eigenvector
    let mut v: Vec<C64> = (0..n)
        .map(|i| {
            let t = (i as f64 + 1.0) * 0.618_033_988_749_895;
            C64::new(1.0 + 0.25 * (t * 7.0).sin(), 0.25 * (t * 3.0).cos())
        })
        .collect();
    normalize(&mut v);
    for _ in 0..3 {
        v = lu.solve(&v);
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            break;
        }
        normalize(&mut v);
    }
    v
}

/// Eigenvalues with default options except for tolerance and sweep limit.
pub fn eig_complex(m: &ComplexMatrix, tol: f64, max_iter: usize) -> EigenResult {
    eig_with(m, &EigenOptions { tol, max_iter, ..EigenOptions::default() })
}

pub fn eig_with(m: &ComplexMatrix, opts: &EigenOptions) -> EigenResult {
    let n = m.dim();
    if n == 0 {
        return EigenResult {
            eigenvalues: vec![],
            converged: vec![],
            iterations: 0,
            path: SolverPath::HessenbergQr,
            eigenvectors: None,
            residuals: None,
        };
    }
    if opts.method == EigenMethod::Auto && m.is_complex_symmetric() {
        let (kl, _) = m.bandwidths();
        if kl <= opts.max_band {
            if let Some(r) = symmetric_path(m, kl, opts) {
                return r;
            }
        }
    }
    general_path(m, opts)
}

fn symmetric_path(m: &ComplexMatrix, b: usize, opts: &EigenOptions) -> Option<EigenResult> {
    let (mut d, e) = symmetric::reduce_to_tridiagonal(m, b).ok()?;
    let iterations = symmetric::tridiagonal_ql(&mut d, &e, opts.tol, opts.max_iter).ok()?;
    if d.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return None;
    }
    let n = d.len();
    Some(EigenResult {
        eigenvalues: d,
        converged: vec![true; n],
        iterations,
        path: SolverPath::SymmetricBand,
        eigenvectors: None,
        residuals: None,
    })
}

/// Householder reduction to upper Hessenberg form, in place.
pub fn hessenberg_reduce(a: &mut ComplexMatrix) {
    let n = a.dim();
    if a.is_upper_hessenberg() {
        return;
    }
    let mut v = vec![C64::new(0.0, 0.0); n];
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let xnorm: f64 = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        for (idx, i) in (k + 1..n).enumerate() {
            v[idx] = a[(i, k)];
        }
        v[0] -= alpha;
        let vnorm: f64 = v[..len].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        v[..len].iter_mut().for_each(|z| *z /= vnorm);
        // A <- (I - 2vv^H) A
        for j in k..n {
            let mut dot = C64::new(0.0, 0.0);
            for idx in 0..len {
                dot += v[idx].conj() * a[(k + 1 + idx, j)];
            }
            dot *= 2.0;
            for idx in 0..len {
                a[(k + 1 + idx, j)] -= v[idx] * dot;
            }
        }
        // A <- A (I - 2vv^H)
        for i in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for idx in 0..len {
                dot += a[(i, k + 1 + idx)] * v[idx];
            }
            dot *= 2.0;
            for idx in 0..len {
                a[(i, k + 1 + idx)] -= dot * v[idx].conj();
            }
        }
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = C64::new(0.0, 0.0);
        }
    }
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) / 2.0;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) / 2.0;
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn general_path(m: &ComplexMatrix, opts: &EigenOptions) -> EigenResult {
    let n = m.dim();
    let mut h = m.clone();
    hessenberg_reduce(&mut h);
    let mut eig = vec![C64::new(0.0, 0.0); n];
    let mut converged = vec![true; n];
    let mut total = 0usize;
    let mut rot: Vec<(f64, C64)> = Vec::with_capacity(n);
    let norm = h.frobenius_norm();
    let mut hi = n - 1;
    let mut iter = 0usize;
    loop {
        // deflation scan from the bottom of the active block
        let mut l = hi;
        while l > 0 {
            let s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let s = if s == 0.0 { norm } else { s };
            if h[(l, l - 1)].norm() <= opts.tol * s {
                h[(l, l - 1)] = C64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[(hi, hi)];
            iter = 0;
            if hi == 0 {
                break;
            }
            hi -= 1;
            continue;
        }
        iter += 1;
        total += 1;
        if iter > opts.max_iter {
            for i in l..=hi {
                eig[i] = h[(i, i)];
                converged[i] = false;
            }
            iter = 0;
            if l == 0 {
                break;
            }
            hi = l - 1;
            continue;
        }
        let sigma = if iter.is_multiple_of(10) {
            // exceptional shift to break cycles
            h[(hi, hi)] + C64::new(h[(hi, hi - 1)].norm() * 1.5, h[(hi, hi - 1)].norm() * 0.5)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for i in l..=hi {
            h[(i, i)] -= sigma;
        }
        rot.clear();
        for k in l..hi {
            let a = h[(k, k)];
            let b = h[(k + 1, k)];
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 {
                (1.0, C64::new(0.0, 0.0))
            } else if a.norm() == 0.0 {
                (0.0, b.conj() / b.norm())
            } else {
                let c = a.norm() / r;
                (c, (a / a.norm()) * b.conj() / r)
            };
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = c * x + s * y;
                h[(k + 1, j)] = -s.conj() * x + c * y;
            }
            rot.push((c, s));
        }
        for (idx, &(c, s)) in rot.iter().enumerate() {
            let k = l + idx;
            for i in l..=(k + 1).min(hi) {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = c * x + s.conj() * y;
                h[(i, k + 1)] = -s * x + c * y;
            }
        }
        for i in l..=hi {
            h[(i, i)] += sigma;
        }
    }
    EigenResult {
        eigenvalues: eig,
        converged,
        iterations: total,
        path: SolverPath::HessenbergQr,
        eigenvectors: None,
        residuals: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    fn random_dense(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<C64>> =
            (0..n).map(|_| (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()).collect();
        ComplexMatrix::from_rows(&rows)
    }

    #[test]
    fn diagonal_is_returned_exactly() {
        let m = ComplexMatrix::from_diag(&[c(1.0, 0.0), c(2.0, 1.0)]);
        let r = eig_complex(&m, f64::EPSILON, 30);
        assert_eq!(sorted(r.eigenvalues), vec![c(1.0, 0.0), c(2.0, 1.0)]);
    }

    #[test]
    fn swap_matrix() {
        let m = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]);
        for method in [EigenMethod::Auto, EigenMethod::General] {
            let r = eig_with(&m, &EigenOptions { method, ..Default::default() });
            let e = sorted(r.eigenvalues);
            assert!((e[0] - c(-1.0, 0.0)).norm() < 1e-14 && (e[1] - c(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn hessenberg_preserves_spectrum_invariants() {
        let m = random_dense(12, 1);
        let mut h = m.clone();
        hessenberg_reduce(&mut h);
        assert!(h.is_upper_hessenberg());
        let tr: C64 = (0..12).map(|i| m[(i, i)]).sum();
        let trh: C64 = (0..12).map(|i| h[(i, i)]).sum();
        assert!((tr - trh).norm() < 1e-12);
        assert!((m.frobenius_norm() - h.frobenius_norm()).abs() < 1e-12);
    }

    #[test]
    fn dense_random_residuals() {
        let m = random_dense(40, 2);
        let mut r = eig_complex(&m, f64::EPSILON, 60);
        assert!(r.all_converged());
        r.compute_all_eigenvectors(&m);
        assert!(r.max_residual().unwrap() < 1e-12);
        let tr: C64 = (0..40).map(|i| m[(i, i)]).sum();
        let sum: C64 = r.eigenvalues.iter().sum();
        assert!((tr - sum).norm() < 1e-10);
    }

    #[test]
    fn symmetric_fast_path_agrees_with_general() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 60;
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in i..=(i + 2).min(n - 1) {
                let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-0.3..0.3));
                m[(i, j)] = z;
                m[(j, i)] = z;
            }
        }
        let fast = eig_with(&m, &EigenOptions::default());
        assert_eq!(fast.path, SolverPath::SymmetricBand);
        let slow = eig_with(&m, &EigenOptions { method: EigenMethod::General, ..Default::default() });
        assert_eq!(slow.path, SolverPath::HessenbergQr);
        let mut used = vec![false; n];
        for z in &fast.eigenvalues {
            let (j, d) = slow
                .eigenvalues
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .map(|(j, w)| (j, (w - z).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            used[j] = true;
            assert!(d < 1e-9, "{z} off by {d}");
        }
    }

    #[test]
    fn unconverged_eigenvalues_are_flagged() {
        let m = random_dense(10, 4);
        let r = eig_complex(&m, 0.0, 2);
        assert!(!r.all_converged());
        assert_eq!(r.eigenvalues.len(), 10);
    }
}
