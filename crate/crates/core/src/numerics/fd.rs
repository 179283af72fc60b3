//! Finite-difference derivatives of grid functions.

use serde::{Deserialize, Serialize};

use super::NumericsError;
use crate::special::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum FdAccuracy {
    #[serde(rename = "2")]
    Second,
    #[default]
    #[serde(rename = "4")]
    Fourth,
}

impl FdAccuracy {
    pub fn order(self) -> usize {
        match self {
            FdAccuracy::Second => 2,
            FdAccuracy::Fourth => 4,
        }
    }

    pub fn from_order(order: usize) -> Option<Self> {
        match order {
            2 => Some(FdAccuracy::Second),
            4 => Some(FdAccuracy::Fourth),
            _ => None,
        }
    }
}

/// Fornberg's recursion: weights of the `m`-th derivative at `z0` from
/// values at `nodes`.
pub fn fornberg_weights(z0: f64, nodes: &[f64], m: usize) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

fn central_weights(order: usize, acc: FdAccuracy) -> &'static [f64] {
    match (order, acc) {
        (1, FdAccuracy::Second) => &[-0.5, 0.0, 0.5],
        (1, FdAccuracy::Fourth) => &[1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0],
        (2, FdAccuracy::Second) => &[1.0, -2.0, 1.0],
        _ => &[-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0],
    }
}

/// First or second derivative with central stencils in the interior and
/// one-sided stencils of the same accuracy near both ends.
pub fn fd_derivative(f: &[C64], h: f64, order: usize, acc: FdAccuracy) -> Result<Vec<C64>, NumericsError> {
    if !(order == 1 || order == 2) {
        return Err(NumericsError::DerivativeOrder(order));
    }
    let n = f.len();
    let center = central_weights(order, acc);
    let r = center.len() / 2;
    let side_width = order + acc.order();
    if n < side_width.max(center.len()) {
        return Err(NumericsError::StencilTooLarge { points: n, width: side_width });
    }
    let scale = h.powi(order as i32);
    let mut out = vec![C64::new(0.0, 0.0); n];
    for i in r..n - r {
        let mut acc_sum = C64::new(0.0, 0.0);
        for (k, w) in center.iter().enumerate() {
            acc_sum += f[i + k - r] * *w;
        }
        out[i] = acc_sum / scale;
    }
    let nodes: Vec<f64> = (0..side_width).map(|k| k as f64).collect();
    for i in 0..r {
        let w = fornberg_weights(i as f64, &nodes, order);
        let left: C64 = w.iter().enumerate().map(|(k, w)| f[k] * *w).sum();
        out[i] = left / scale;
        // mirrored stencil at the right end; odd derivatives flip sign
        let sign = if order % 2 == 1 { -1.0 } else { 1.0 };
        let right: C64 = w.iter().enumerate().map(|(k, w)| f[n - 1 - k] * *w).sum();
        out[n - 1 - i] = sign * right / scale;
    }
    Ok(out)
}
