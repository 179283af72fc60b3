//! Discretize, diagonalize and match one parameter set; run many in parallel.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eigen::{eig_with, EigenOptions, SolverPath};
use super::hamiltonian::{discretize_potential, StencilOrder};
use super::matching::{match_spectrum, wants_vector, MatchOptions, MatchReport};
use super::Grid;
use crate::potentials::{Family, PotentialParams};
use crate::Error;

/// Box and resolution for one numerical check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSettings {
    pub half_width: f64,
    pub n: usize,
    pub order: StencilOrder,
}

impl GridSettings {
    /// Per-family defaults: the oscillator box scales with δ; the hyperbolic
    /// families need wide boxes because their shallowest levels decay slowly,
    /// and Pöschl-Teller also needs a fine mesh for its narrow core.
    pub fn default_for(params: &PotentialParams) -> Self {
        match params {
            PotentialParams::Oscillator(p) => Self { half_width: 10.0 + p.delta, n: 1500, order: StencilOrder::Fourth },
            PotentialParams::PoschlTeller(_) => Self { half_width: 45.0, n: 2249, order: StencilOrder::Fourth },
            PotentialParams::Scarf(_) => Self { half_width: 30.0, n: 1199, order: StencilOrder::Fourth },
        }
    }

    pub fn grid(&self) -> Result<Grid, Error> {
        Ok(Grid::new(self.half_width, self.n)?)
    }
}

/// Default energy cutoff: every bound level for the hyperbolic families, the
/// first few levels of the oscillator.
pub fn default_cutoff(params: &PotentialParams) -> f64 {
    match params.family() {
        Family::Oscillator => 20.0,
        Family::PoschlTeller | Family::Scarf => 0.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericJob {
    pub params: PotentialParams,
    pub grid: GridSettings,
    pub cutoff: f64,
    pub matching: MatchOptions,
    pub eigen: EigenOptions,
}

impl NumericJob {
    pub fn new(params: PotentialParams) -> Self {
        Self {
            params,
            grid: GridSettings::default_for(&params),
            cutoff: default_cutoff(&params),
            matching: MatchOptions::default(),
            eigen: EigenOptions::default(),
        }
    }

    pub fn with_grid(mut self, half_width: f64, n: usize, order: StencilOrder) -> Self {
        self.grid = GridSettings { half_width, n, order };
        self
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.cutoff = cutoff;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericOutcome {
    pub job: NumericJob,
    pub report: MatchReport,
    pub dimension: usize,
    pub iterations: usize,
    pub path: SolverPath,
    pub all_converged: bool,
}

pub fn solve_job(job: &NumericJob) -> Result<NumericOutcome, Error> {
    let grid = job.grid.grid()?;
    let m = discretize_potential(&job.params, &grid, job.grid.order)?;
    let mut eig = eig_with(&m, &job.eigen);
    eig.compute_eigenvectors(&m, |l| wants_vector(l, job.cutoff, &job.matching));
    let analytic = job.params.levels_below(job.cutoff);
    let report = match_spectrum(&eig, &analytic, job.cutoff, &grid, &job.matching)?;
    Ok(NumericOutcome {
        job: job.clone(),
        report,
        dimension: m.dim(),
        iterations: eig.iterations,
        path: eig.path,
        all_converged: eig.all_converged(),
    })
}

/// Independent jobs on the rayon pool; results keep the input order.
pub fn solve_batch(jobs: &[NumericJob]) -> Vec<Result<NumericOutcome, Error>> {
    jobs.par_iter().map(solve_job).collect()
}
