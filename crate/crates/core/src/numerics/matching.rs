//! Matching discrete eigenvalues against closed-form levels.

use serde::{Deserialize, Serialize};

use super::eigen::EigenResult;
use super::{Grid, NumericsError};
use crate::potentials::LevelIndex;
use crate::special::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchOptions {
    /// Largest `|Im λ|` for a discrete eigenvalue to count as real.
    pub im_tol: f64,
    /// Fraction of the half-width, measured from each wall, counted as boundary.
    pub boundary_fraction: f64,
    /// Largest share of `|v|²` allowed in the boundary zone.
    pub boundary_mass_tol: f64,
    /// Discrete eigenvalues up to `cutoff + cutoff_margin` may be matched.
    pub cutoff_margin: f64,
}

impl Default for MatchOptions {
    fn default() -> Self {
        Self { im_tol: 1e-5, boundary_fraction: 0.1, boundary_mass_tol: 1e-6, cutoff_margin: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedLevel {
    pub level: LevelIndex,
    pub analytic: f64,
    pub numeric: C64,
    pub delta: f64,
    pub boundary_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub matched: Vec<MatchedLevel>,
    pub max_delta: f64,
    pub max_imag: f64,
    pub unmatched: Vec<(LevelIndex, f64)>,
    /// Discrete eigenvalues below the cutoff left without an analytic partner.
    pub spurious: usize,
    pub candidates: usize,
    pub max_residual: Option<f64>,
}

impl MatchReport {
    pub fn all_matched(&self) -> bool {
        self.unmatched.is_empty()
    }

    pub fn level(&self, level: LevelIndex) -> Option<&MatchedLevel> {
        self.matched.iter().find(|m| m.level == level)
    }
}

/// Share of `Σ|v|²` carried by nodes within `fraction·L` of either wall.
pub fn boundary_mass(grid: &Grid, v: &[C64], fraction: f64) -> f64 {
    let edge = (1.0 - fraction) * grid.half_width();
    let mut total = 0.0;
    let mut outer = 0.0;
    for (x, z) in grid.points().iter().zip(v) {
        let w = z.norm_sqr();
        total += w;
        if x.abs() > edge {
            outer += w;
        }
    }
    if total > 0.0 {
        outer / total
    } else {
        1.0
    }
}

/// Whether an eigenvalue needs an eigenvector for matching.
pub fn wants_vector(lambda: C64, cutoff: f64, opts: &MatchOptions) -> bool {
    lambda.im.abs() < opts.im_tol && lambda.re < cutoff + opts.cutoff_margin
}

/// Greedy nearest-distance injective matching; ties go to the lower level.
pub fn match_spectrum(
    eig: &EigenResult,
    analytic: &[(LevelIndex, f64)],
    cutoff: f64,
    grid: &Grid,
    opts: &MatchOptions,
) -> Result<MatchReport, NumericsError> {
    let mut candidates = Vec::new();
    let mut below_cutoff = Vec::new();
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if !wants_vector(lambda, cutoff, opts) {
            continue;
        }
        let v = eig.eigenvector(i).ok_or(NumericsError::MissingEigenvector(lambda))?;
        if v.len() != grid.n() {
            return Err(NumericsError::LengthMismatch { expected: grid.n(), got: v.len() });
        }
        let mass = boundary_mass(grid, v, opts.boundary_fraction);
        if lambda.re < cutoff {
            below_cutoff.push(i);
        }
        if mass < opts.boundary_mass_tol {
            candidates.push((i, mass));
        }
    }

    let mut levels: Vec<(LevelIndex, f64)> = analytic.iter().copied().filter(|(_, e)| *e < cutoff).collect();
    levels.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));

    let mut pairs = Vec::with_capacity(levels.len() * candidates.len());
    for (li, (_, e)) in levels.iter().enumerate() {
        for (ci, &(i, _)) in candidates.iter().enumerate() {
            pairs.push(((eig.eigenvalues[i] - C64::new(*e, 0.0)).norm(), li, ci));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut level_used = vec![None; levels.len()];
    let mut cand_used = vec![false; candidates.len()];
    for (_, li, ci) in pairs {
        if level_used[li].is_none() && !cand_used[ci] {
            level_used[li] = Some(ci);
            cand_used[ci] = true;
        }
    }

    let mut matched = Vec::new();
    let mut unmatched = Vec::new();
    let mut max_delta = 0.0f64;
    let mut max_imag = 0.0f64;
    let mut max_residual: Option<f64> = None;
    let mut matched_eig = Vec::new();
    for (li, &(level, e)) in levels.iter().enumerate() {
        match level_used[li] {
            Some(ci) => {
                let (i, mass) = candidates[ci];
                let lambda = eig.eigenvalues[i];
                let delta = (lambda - C64::new(e, 0.0)).norm();
                max_delta = max_delta.max(delta);
                max_imag = max_imag.max(lambda.im.abs());
                if let Some(r) = eig.residuals.as_ref().and_then(|r| r[i]) {
                    max_residual = Some(max_residual.map_or(r, |m| m.max(r)));
                }
                matched_eig.push(i);
                matched.push(MatchedLevel { level, analytic: e, numeric: lambda, delta, boundary_mass: mass });
            }
            None => unmatched.push((level, e)),
        }
    }
    let spurious = below_cutoff.iter().filter(|i| !matched_eig.contains(i)).count();
    Ok(MatchReport { matched, max_delta, max_imag, unmatched, spurious, candidates: candidates.len(), max_residual })
}
