use serde::{Deserialize, Serialize};

use super::matrix::ComplexMatrix;
use super::{Grid, NumericsError};
use crate::potentials::{PotentialError, PotentialParams};
use crate::special::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum StencilOrder {
    #[serde(rename = "2")]
    Second,
    #[default]
    #[serde(rename = "4")]
    Fourth,
}

impl StencilOrder {
    pub fn from_order(order: usize) -> Option<Self> {
        match order {
            2 => Some(StencilOrder::Second),
            4 => Some(StencilOrder::Fourth),
            _ => None,
        }
    }

    pub fn order(self) -> usize {
        match self {
            StencilOrder::Second => 2,
            StencilOrder::Fourth => 4,
        }
    }
}

/// `-d²/dx² + V` with Dirichlet walls just outside the grid.
pub fn discretize_hamiltonian(v: &[C64], grid: &Grid, order: StencilOrder) -> Result<ComplexMatrix, NumericsError> {
    grid.check_len(v)?;
    if let Some(index) = v.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(NumericsError::NonFinite { index });
    }
    let n = grid.n();
    let h2 = grid.h() * grid.h();
    let stencil: &[f64] = match order {
        StencilOrder::Second => &[-1.0, 2.0, -1.0],
        StencilOrder::Fourth => &[1.0 / 12.0, -16.0 / 12.0, 30.0 / 12.0, -16.0 / 12.0, 1.0 / 12.0],
    };
    let r = stencil.len() / 2;
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n {
        for (k, w) in stencil.iter().enumerate() {
            let j = i as isize + k as isize - r as isize;
            if (0..n as isize).contains(&j) {
                m[(i, j as usize)] = C64::new(w / h2, 0.0);
            }
        }
        m[(i, i)] += v[i];
    }
    Ok(m)
}

pub fn discretize_potential(
    params: &PotentialParams,
    grid: &Grid,
    order: StencilOrder,
) -> Result<ComplexMatrix, crate::Error> {
    let v = grid.sample(|x| params.potential_value(x))?;
    Ok(discretize_hamiltonian(&v, grid, order)?)
}

/// Samples of `V` on the grid; convenience for callers that reuse them.
pub fn sample_potential(params: &PotentialParams, grid: &Grid) -> Result<Vec<C64>, PotentialError> {
    grid.sample(|x| params.potential_value(x))
}
