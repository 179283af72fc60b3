//! Grids, finite-difference operators, the non-Hermitian eigensolver and
//! spectrum matching against analytic towers.

pub mod batch;
pub mod eigen;
pub mod fd;
pub mod hamiltonian;
pub mod lu;
pub mod matching;
pub mod matrix;
mod symmetric;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::special::C64;

pub use batch::{default_cutoff, solve_batch, solve_job, GridSettings, NumericJob, NumericOutcome};
pub use eigen::{eig_complex, eig_with, EigenMethod, EigenOptions, EigenResult, SolverPath};
pub use fd::{fd_derivative, FdAccuracy};
pub use hamiltonian::{discretize_hamiltonian, discretize_potential, StencilOrder};
pub use matching::{match_spectrum, MatchOptions, MatchReport, MatchedLevel};
pub use matrix::ComplexMatrix;

/// Smallest number of interior points a grid may carry.
pub const MIN_GRID_POINTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("grid needs at least {min} interior points (got {n})")]
    GridTooSmall { n: usize, min: usize },
    #[error("grid half-width must be positive and finite (got {0})")]
    InvalidHalfWidth(f64),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite value at node {index}")]
    NonFinite { index: usize },
    #[error("{points} points are too few for a {width}-point stencil")]
    StencilTooLarge { points: usize, width: usize },
    #[error("unsupported derivative order {0}")]
    DerivativeOrder(usize),
    #[error("eigenvector missing for candidate eigenvalue {0}")]
    MissingEigenvector(C64),
    #[error("complex-orthogonal reduction broke down at step {0}")]
    Breakdown(usize),
}

/// Uniform grid of `n` interior points on `(-L, L)`; the Dirichlet nodes at
/// `±L` are not stored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    half_width: f64,
    n: usize,
    h: f64,
    #[serde(skip)]
    points: Vec<f64>,
}

impl Grid {
    pub fn new(half_width: f64, n: usize) -> Result<Self, NumericsError> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(NumericsError::InvalidHalfWidth(half_width));
        }
        if n < MIN_GRID_POINTS {
            return Err(NumericsError::GridTooSmall { n, min: MIN_GRID_POINTS });
        }
        let h = 2.0 * half_width / (n as f64 + 1.0);
        let points = (0..n)
            .map(|i| {
                // mirror the upper half so the grid is exactly symmetric
                let j = i.min(n - 1 - i);
                let x = -half_width + (j as f64 + 1.0) * h;
                let x = if 2 * j + 1 == n { 0.0 } else { x };
                if j == i {
                    x
                } else {
                    -x
                }
            })
            .collect();
        Ok(Self { half_width, n, h, points })
    }

    /// Grid whose spacing is as close to `h` as the interior-point count allows.
    pub fn with_spacing(half_width: f64, h: f64) -> Result<Self, NumericsError> {
        let n = (2.0 * half_width / h).round() as usize;
        Self::new(half_width, n.saturating_sub(1))
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Whether node `i` lies within `frac * L` of the origin.
    pub fn is_interior(&self, i: usize, frac: f64) -> bool {
        self.points[i].abs() <= frac * self.half_width
    }

    pub fn sample<E>(&self, mut f: impl FnMut(f64) -> Result<C64, E>) -> Result<Vec<C64>, E> {
        self.points.iter().map(|&x| f(x)).collect()
    }

    pub fn check_len(&self, f: &[C64]) -> Result<(), NumericsError> {
        if f.len() == self.n {
            Ok(())
        } else {
            Err(NumericsError::LengthMismatch { expected: self.n, got: f.len() })
        }
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            half_width: f64,
            n: usize,
        }
        let raw = Raw::deserialize(d)?;
        Grid::new(raw.half_width, raw.n).map_err(serde::de::Error::custom)
    }
}

/// `max |f_i|` over the nodes with `|x_i| <= frac * L`.
pub fn interior_max(grid: &Grid, f: &[C64], frac: f64) -> f64 {
    f.iter().enumerate().filter(|(i, _)| grid.is_interior(*i, frac)).fold(0.0, |m, (_, z)| m.max(z.norm()))
}

pub fn max_abs(f: &[C64]) -> f64 {
    f.iter().fold(0.0, |m, z| m.max(z.norm()))
}
