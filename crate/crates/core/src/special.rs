//! Complex-argument special functions: generalized Laguerre and Jacobi
//! polynomials, principal-branch powers and the hyperbolic family.

use num_complex::Complex64;
use thiserror::Error;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Magnitude below which `sinh`/`cosh` are treated as vanishing.
const POLE_EPS: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("degenerate Jacobi recurrence at k = {k} (orders a = {a}, b = {b})")]
    DegenerateJacobi { k: usize, a: f64, b: f64 },
    #[error("principal power of zero with non-positive exponent {exponent}")]
    ZeroToNonPositive { exponent: f64 },
    #[error("{function} has a pole at z = {z}")]
    Pole { function: &'static str, z: C64 },
    #[error("non-finite result in {0}")]
    NonFinite(&'static str),
}

pub(crate) fn ensure_finite(z: C64, what: &'static str) -> Result<C64, SpecialError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(SpecialError::NonFinite(what))
    }
}

/// Generalized Laguerre polynomial `L_n^{(a)}(z)` by forward recurrence
/// `(k+1) L_{k+1} = (2k+1+a-z) L_k - (k+a) L_{k-1}`.
pub fn laguerre(n: usize, a: f64, z: C64) -> C64 {
    let mut prev = C64::new(0.0, 0.0);
    let mut cur = C64::new(1.0, 0.0);
    for k in 0..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - z) * cur - (kf + a) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Jacobi polynomial `P_n^{(a,b)}(y)` by the standard three-term recurrence.
///
/// Negative non-integer orders are allowed. When the leading recurrence
/// coefficient `2k(k+a+b)(2k+a+b-2)` vanishes for some needed `k` the
/// evaluation is refused rather than divided through.
pub fn jacobi(n: usize, a: f64, b: f64, y: C64) -> Result<C64, SpecialError> {
    if n == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    let ab = a + b;
    let mut prev = C64::new(1.0, 0.0);
    let mut cur = C64::new((a - b) / 2.0, 0.0) + (1.0 + ab / 2.0) * y;
    for k in 2..=n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        let lead = 2.0 * kf * (kf + ab) * (s - 2.0);
        let scale = 2.0 * kf * (kf + ab.abs() + 1.0) * (s.abs() + 2.0);
        if lead.abs() <= 1e-12 * scale {
            return Err(SpecialError::DegenerateJacobi { k, a, b });
        }
        let c1 = (s - 1.0) * (s * (s - 2.0) * y + (a * a - b * b));
        let c2 = 2.0 * (kf + a - 1.0) * (kf + b - 1.0) * s;
        let next = (c1 * cur - c2 * prev) / lead;
        prev = cur;
        cur = next;
    }
    ensure_finite(cur, "jacobi")
}

/// Derivative `d/dy P_n^{(a,b)}(y) = (n+a+b+1)/2 · P_{n-1}^{(a+1,b+1)}(y)`.
pub fn jacobi_derivative(n: usize, a: f64, b: f64, y: C64) -> Result<C64, SpecialError> {
    if n == 0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let factor = (n as f64 + a + b + 1.0) / 2.0;
    Ok(factor * jacobi(n - 1, a + 1.0, b + 1.0, y)?)
}

/// Derivative `d/dz L_n^{(a)}(z) = -L_{n-1}^{(a+1)}(z)`.
pub fn laguerre_derivative(n: usize, a: f64, z: C64) -> C64 {
    if n == 0 {
        C64::new(0.0, 0.0)
    } else {
        -laguerre(n - 1, a + 1.0, z)
    }
}

/// `exp(s · Log z)` with `Log` the principal branch, `arg z ∈ (-π, π]`.
pub fn principal_power(z: C64, s: f64) -> Result<C64, SpecialError> {
    if z == C64::new(0.0, 0.0) {
        return if s > 0.0 { Ok(C64::new(0.0, 0.0)) } else { Err(SpecialError::ZeroToNonPositive { exponent: s }) };
    }
    if s == 0.0 {
        return Ok(C64::new(1.0, 0.0));
    }
    if s == 1.0 {
        return Ok(z);
    }
    let log = C64::new(z.norm().ln(), z.arg());
    ensure_finite((s * log).exp(), "principal_power")
}

/// `cosh z` and `sinh z` of one argument, with checked reciprocals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperbolics {
    pub z: C64,
    pub cosh: C64,
    pub sinh: C64,
}

impl Hyperbolics {
    pub fn new(z: C64) -> Self {
        Self { z, cosh: z.cosh(), sinh: z.sinh() }
    }

    fn nonzero(&self, v: C64, function: &'static str) -> Result<C64, SpecialError> {
        if v.norm() <= POLE_EPS {
            Err(SpecialError::Pole { function, z: self.z })
        } else {
            Ok(v)
        }
    }

    pub fn tanh(&self) -> Result<C64, SpecialError> {
        Ok(self.sinh / self.nonzero(self.cosh, "tanh")?)
    }

    pub fn coth(&self) -> Result<C64, SpecialError> {
        Ok(self.cosh / self.nonzero(self.sinh, "coth")?)
    }

    pub fn sech(&self) -> Result<C64, SpecialError> {
        Ok(self.nonzero(self.cosh, "sech")?.inv())
    }

    pub fn cosech(&self) -> Result<C64, SpecialError> {
        Ok(self.nonzero(self.sinh, "cosech")?.inv())
    }
}

/// Evaluate the hyperbolic family at `z`; see [`Hyperbolics`] for the
/// pole-checked components.
pub fn complex_hyperbolics(z: C64) -> Hyperbolics {
    Hyperbolics::new(z)
}
