//! Grid-function plumbing shared by the operator identity checks.
//!
//! Operator compositions are evaluated with exact derivatives on the inner
//! layers (test functions come with closed-form derivatives) and a single
//! finite-difference layer outermost.

use serde::{Deserialize, Serialize};

use crate::numerics::fd::{fd_derivative, FdAccuracy};
use crate::numerics::{Grid, NumericsError};
use crate::special::C64;

/// Samples of a function and its first two derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub f: Vec<C64>,
    pub d1: Vec<C64>,
    pub d2: Vec<C64>,
}

impl Jet {
    pub fn zeros(n: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); n];
        Self { f: z.clone(), d1: z.clone(), d2: z }
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    pub fn check(&self, grid: &Grid) -> Result<(), NumericsError> {
        grid.check_len(&self.f)?;
        grid.check_len(&self.d1)?;
        grid.check_len(&self.d2)
    }
}

/// Where the derivative in a first-order operator comes from.
#[derive(Debug, Clone, Copy)]
pub enum Derivative<'a> {
    /// Caller-supplied samples of `f'`.
    Analytic(&'a [C64]),
    FiniteDifference(FdAccuracy),
}

/// `exp(-(x - c)² / (2 w²) + i k x)`, effectively compactly supported on the
/// grids used here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    pub center: f64,
    pub width: f64,
    pub wave: f64,
}

impl GaussianPacket {
    pub const fn new(center: f64, width: f64, wave: f64) -> Self {
        Self { center, width, wave }
    }

    /// `(f, f', f'')` at `x`.
    pub fn eval(&self, x: f64) -> (C64, C64, C64) {
        let w2 = self.width * self.width;
        let t = x - self.center;
        let phi = C64::new(-t * t / (2.0 * w2), self.wave * x);
        let f = phi.exp();
        let dphi = C64::new(-t / w2, self.wave);
        let d2phi = -1.0 / w2;
        (f, dphi * f, (d2phi + dphi * dphi) * f)
    }

    pub fn jet(&self, grid: &Grid) -> Jet {
        let mut jet = Jet::zeros(grid.n());
        for (i, &x) in grid.points().iter().enumerate() {
            let (f, d1, d2) = self.eval(x);
            jet.f[i] = f;
            jet.d1[i] = d1;
            jet.d2[i] = d2;
        }
        jet
    }
}

/// Three off-centre packets with different widths and phases.
pub fn standard_packets() -> [GaussianPacket; 3] {
    [GaussianPacket::new(-0.7, 1.2, 0.4), GaussianPacket::new(0.2, 1.4, -0.3), GaussianPacket::new(0.9, 1.1, 0.6)]
}

/// `sign·f' + w·f`.
pub fn first_order(sign: f64, w: &[C64], f: &[C64], deriv: Derivative<'_>, h: f64) -> Result<Vec<C64>, NumericsError> {
    check_same(w, f)?;
    let owned;
    let d = match deriv {
        Derivative::Analytic(d) => {
            check_same(d, f)?;
            d
        }
        Derivative::FiniteDifference(acc) => {
            owned = fd_derivative(f, h, 1, acc)?;
            &owned
        }
    };
    Ok(f.iter().zip(d).zip(w).map(|((f, d), w)| sign * d + w * f).collect())
}

/// `a·f'' + b·f' + c·f` with `f'`, `f''` from finite differences.
pub fn second_order_fd(
    a: &[C64],
    b: &[C64],
    c: &[C64],
    f: &[C64],
    h: f64,
    acc: FdAccuracy,
) -> Result<Vec<C64>, NumericsError> {
    check_same(a, f)?;
    check_same(b, f)?;
    check_same(c, f)?;
    let d1 = fd_derivative(f, h, 1, acc)?;
    let d2 = fd_derivative(f, h, 2, acc)?;
    Ok((0..f.len()).map(|i| a[i] * d2[i] + b[i] * d1[i] + c[i] * f[i]).collect())
}

/// `-f'' + u·f` from finite differences.
pub fn schrodinger_fd(u: &[C64], f: &[C64], h: f64, acc: FdAccuracy) -> Result<Vec<C64>, NumericsError> {
    check_same(u, f)?;
    let d2 = fd_derivative(f, h, 2, acc)?;
    Ok((0..f.len()).map(|i| -d2[i] + u[i] * f[i]).collect())
}

/// `-f'' + u·f` from a jet.
pub fn schrodinger_exact(u: &[C64], jet: &Jet) -> Vec<C64> {
    (0..jet.len()).map(|i| -jet.d2[i] + u[i] * jet.f[i]).collect()
}

fn check_same(a: &[C64], b: &[C64]) -> Result<(), NumericsError> {
    if a.len() == b.len() {
        Ok(())
    } else {
        Err(NumericsError::LengthMismatch { expected: b.len(), got: a.len() })
    }
}

pub fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
