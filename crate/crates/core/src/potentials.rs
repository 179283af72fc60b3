//! The three PT-symmetric families: complex-shifted oscillator, generalized
//! Pöschl-Teller and Scarf II.
//!
//! Each family carries two towers of real levels labelled by a quasi-parity
//! `q = ±1`. Parameter records are plain values; [`PotentialParams::validate`]
//! enforces the family domain, but every evaluator also accepts shifted
//! parameter sets that leave the strict domain (the PSUSY partners need them),
//! in which case a finite tower may simply be empty.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::special::{self, jacobi, jacobi_derivative, laguerre, laguerre_derivative, SpecialError, C64, I};

/// Distance to the nearest integer below which a value counts as integral.
pub const INTEGER_TIE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    #[serde(alias = "osc")]
    Oscillator,
    #[serde(alias = "pt", alias = "poeschl-teller", alias = "poschl_teller")]
    PoschlTeller,
    #[serde(alias = "scarf2", alias = "scarf-ii")]
    Scarf,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Oscillator, Family::PoschlTeller, Family::Scarf];

    pub fn name(self) -> &'static str {
        match self {
            Family::Oscillator => "oscillator",
            Family::PoschlTeller => "poschl-teller",
            Family::Scarf => "scarf",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "oscillator" | "osc" => Ok(Family::Oscillator),
            "poschl-teller" | "pt" | "poeschl-teller" | "poschl_teller" => Ok(Family::PoschlTeller),
            "scarf" | "scarf2" | "scarf-ii" => Ok(Family::Scarf),
            other => Err(format!("unknown family `{other}`")),
        }
    }
}

/// Quasi-parity `q`: quasi-even (`+1`) or quasi-odd (`-1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QuasiParity {
    #[serde(rename = "+")]
    Even,
    #[serde(rename = "-")]
    Odd,
}

impl QuasiParity {
    pub const BOTH: [QuasiParity; 2] = [QuasiParity::Even, QuasiParity::Odd];

    pub fn sign(self) -> f64 {
        match self {
            QuasiParity::Even => 1.0,
            QuasiParity::Odd => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            QuasiParity::Even => '+',
            QuasiParity::Odd => '-',
        }
    }
}

/// One level of one tower.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LevelIndex {
    pub q: QuasiParity,
    pub n: u32,
}

impl LevelIndex {
    pub const fn new(q: QuasiParity, n: u32) -> Self {
        Self { q, n }
    }

    pub const fn even(n: u32) -> Self {
        Self::new(QuasiParity::Even, n)
    }

    pub const fn odd(n: u32) -> Self {
        Self::new(QuasiParity::Odd, n)
    }
}

impl fmt::Display for LevelIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.q.symbol(), self.n)
    }
}

impl FromStr for LevelIndex {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (q, rest) = match s.chars().next() {
            Some('+') => (QuasiParity::Even, &s[1..]),
            Some('-') => (QuasiParity::Odd, &s[1..]),
            _ => return Err(format!("level `{s}` must start with + or -")),
        };
        let n = rest.parse::<u32>().map_err(|e| format!("level `{s}`: {e}"))?;
        Ok(LevelIndex { q, n })
    }
}

/// Highest level index of a tower.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NMax {
    Unbounded,
    Finite(u32),
    /// Only reachable for shifted parameters outside the strict family domain.
    Empty,
}

impl NMax {
    pub fn contains(self, n: u32) -> bool {
        match self {
            NMax::Unbounded => true,
            NMax::Finite(m) => n <= m,
            NMax::Empty => false,
        }
    }

    /// Number of levels, `None` when unbounded.
    pub fn count(self) -> Option<usize> {
        match self {
            NMax::Unbounded => None,
            NMax::Finite(m) => Some(m as usize + 1),
            NMax::Empty => Some(0),
        }
    }
}

impl fmt::Display for NMax {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NMax::Unbounded => f.write_str("unbounded"),
            NMax::Finite(m) => write!(f, "{m}"),
            NMax::Empty => f.write_str("empty"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub alpha: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoschlTellerParams {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScarfParams {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum PotentialParams {
    Oscillator(OscillatorParams),
    PoschlTeller(PoschlTellerParams),
    Scarf(ScarfParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValidationMode {
    #[default]
    Strict,
    /// Accept integer parameter ties (collapsed single-series spectra).
    Limiting,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("parameter {0} is not finite")]
    NonFinite(&'static str),
    #[error("alpha must be positive (got {0})")]
    AlphaNotPositive(f64),
    #[error("delta must be positive (got {0})")]
    DeltaNotPositive(f64),
    #[error("alpha integer ({0}); pass limiting mode to accept integer ties")]
    AlphaInteger(f64),
    #[error("Poschl-Teller requires A + 1/2 > 0 (got A = {0})")]
    PtLowerBound(f64),
    #[error("Poschl-Teller requires B > A + 1/2 (got A = {a}, B = {b})")]
    PtOrdering { a: f64, b: f64 },
    #[error("Poschl-Teller requires gamma in [-pi/4, 0) or (0, pi/4) (got {0})")]
    GammaRange(f64),
    #[error("Poschl-Teller integer tie: B - A - 1/2 = {0}; pass limiting mode to accept")]
    PtIntegerTie(f64),
    #[error("Scarf II requires B - 1/2 > 0 (got B = {0})")]
    ScarfLowerBound(f64),
    #[error("Scarf II requires A > B - 1/2 (got A = {a}, B = {b})")]
    ScarfOrdering { a: f64, b: f64 },
    #[error("Scarf II integer tie: A - B + 1/2 = {0}; pass limiting mode to accept")]
    ScarfIntegerTie(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PotentialError {
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error("level {level} out of range (n_max = {n_max})")]
    LevelOutOfRange { level: LevelIndex, n_max: NMax },
    #[error("grid is not symmetric about the origin (x[{index}] = {x})")]
    AsymmetricGrid { index: usize, x: f64 },
    #[error("the shifted coordinate x - i*delta meets the principal branch cut (delta = {0})")]
    BranchCut(f64),
}

pub(crate) fn is_integer(x: f64) -> bool {
    (x - x.round()).abs() < INTEGER_TIE_EPS
}

/// Largest integer strictly below `x`, `None` when that is negative.
fn largest_int_below(x: f64) -> Option<u32> {
    let x = if is_integer(x) { x.round() } else { x };
    let m = x.ceil() - 1.0;
    (m >= 0.0).then_some(m as u32)
}

fn finite(name: &'static str, v: f64) -> Result<(), ParamError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(ParamError::NonFinite(name))
    }
}

impl PotentialParams {
    pub fn oscillator(alpha: f64, delta: f64) -> Self {
        PotentialParams::Oscillator(OscillatorParams { alpha, delta })
    }

    pub fn poschl_teller(a: f64, b: f64, gamma: f64) -> Self {
        PotentialParams::PoschlTeller(PoschlTellerParams { a, b, gamma })
    }

    pub fn scarf(a: f64, b: f64) -> Self {
        PotentialParams::Scarf(ScarfParams { a, b })
    }

    pub fn family(&self) -> Family {
        match self {
            PotentialParams::Oscillator(_) => Family::Oscillator,
            PotentialParams::PoschlTeller(_) => Family::PoschlTeller,
            PotentialParams::Scarf(_) => Family::Scarf,
        }
    }

    /// Check every family invariant, reporting the first violated one.
    pub fn validate(&self, mode: ValidationMode) -> Result<(), ParamError> {
        let ties_ok = mode == ValidationMode::Limiting;
        match *self {
            PotentialParams::Oscillator(OscillatorParams { alpha, delta }) => {
                finite("alpha", alpha)?;
                finite("delta", delta)?;
                if alpha <= 0.0 {
                    return Err(ParamError::AlphaNotPositive(alpha));
                }
                if delta <= 0.0 {
                    return Err(ParamError::DeltaNotPositive(delta));
                }
                if !ties_ok && is_integer(alpha) {
                    return Err(ParamError::AlphaInteger(alpha));
                }
            }
            PotentialParams::PoschlTeller(PoschlTellerParams { a, b, gamma }) => {
                finite("A", a)?;
                finite("B", b)?;
                finite("gamma", gamma)?;
                if a + 0.5 <= 0.0 {
                    return Err(ParamError::PtLowerBound(a));
                }
                if b <= a + 0.5 {
                    return Err(ParamError::PtOrdering { a, b });
                }
                // closed at -pi/4, open at 0 and +pi/4
                if !((-FRAC_PI_4..0.0).contains(&gamma) || (gamma > 0.0 && gamma < FRAC_PI_4)) {
                    return Err(ParamError::GammaRange(gamma));
                }
                let gap = b - a - 0.5;
                if !ties_ok && is_integer(gap) {
                    return Err(ParamError::PtIntegerTie(gap));
                }
            }
            PotentialParams::Scarf(ScarfParams { a, b }) => {
                finite("A", a)?;
                finite("B", b)?;
                if b - 0.5 <= 0.0 {
                    return Err(ParamError::ScarfLowerBound(b));
                }
                if a <= b - 0.5 {
                    return Err(ParamError::ScarfOrdering { a, b });
                }
                let gap = a - b + 0.5;
                if !ties_ok && is_integer(gap) {
                    return Err(ParamError::ScarfIntegerTie(gap));
                }
            }
        }
        Ok(())
    }

    /// Builder-style validation returning the record itself.
    pub fn validated(self, mode: ValidationMode) -> Result<Self, ParamError> {
        self.validate(mode).map(|()| self)
    }

    /// Whether the two towers collapse into a single series (integer tie).
    pub fn is_integer_tie(&self) -> bool {
        match *self {
            PotentialParams::Oscillator(p) => is_integer(p.alpha),
            PotentialParams::PoschlTeller(p) => is_integer(p.b - p.a - 0.5),
            PotentialParams::Scarf(p) => is_integer(p.a - p.b + 0.5),
        }
    }

    /// Parameter record with `(A + 1/2, B)` exchanged; identity for the oscillator.
    pub fn exchanged(&self) -> Self {
        match *self {
            PotentialParams::Oscillator(p) => PotentialParams::Oscillator(p),
            PotentialParams::PoschlTeller(p) => PotentialParams::poschl_teller(p.b - 0.5, p.a + 0.5, p.gamma),
            PotentialParams::Scarf(p) => PotentialParams::scarf(p.b - 0.5, p.a + 0.5),
        }
    }

    /// The complex potential `V(x)` on the real line.
    pub fn potential_value(&self, x: f64) -> Result<C64, PotentialError> {
        let v = match *self {
            PotentialParams::Oscillator(OscillatorParams { alpha, delta }) => {
                let u = C64::new(x, -delta);
                let u2 = u * u;
                u2 + (alpha * alpha - 0.25) / u2
            }
            PotentialParams::PoschlTeller(PoschlTellerParams { a, b, gamma }) => {
                let h = special::complex_hyperbolics(C64::new(x, -gamma));
                let cosech = h.cosech()?;
                let coth = h.coth()?;
                (b * b + a * (a + 1.0)) * cosech * cosech - b * (2.0 * a + 1.0) * cosech * coth
            }
            PotentialParams::Scarf(ScarfParams { a, b }) => {
                let h = special::complex_hyperbolics(C64::new(x, 0.0));
                let sech = h.sech()?;
                let tanh = h.tanh()?;
                -(b * b + a * (a + 1.0)) * sech * sech + I * b * (2.0 * a + 1.0) * sech * tanh
            }
        };
        Ok(special::ensure_finite(v, "potential_value")?)
    }

    pub fn n_max(&self, q: QuasiParity) -> NMax {
        let bound = match (*self, q) {
            (PotentialParams::Oscillator(_), _) => return NMax::Unbounded,
            (PotentialParams::PoschlTeller(p), QuasiParity::Even) => p.b - 0.5,
            (PotentialParams::PoschlTeller(p), QuasiParity::Odd) => p.a,
            (PotentialParams::Scarf(p), QuasiParity::Even) => p.a,
            (PotentialParams::Scarf(p), QuasiParity::Odd) => p.b - 0.5,
        };
        match largest_int_below(bound) {
            Some(m) => NMax::Finite(m),
            None => NMax::Empty,
        }
    }

    /// Closed-form level energy; always real.
    pub fn energy(&self, level: LevelIndex) -> Result<f64, PotentialError> {
        let n_max = self.n_max(level.q);
        if !n_max.contains(level.n) {
            return Err(PotentialError::LevelOutOfRange { level, n_max });
        }
        Ok(self.energy_unchecked(level))
    }

    fn energy_unchecked(&self, level: LevelIndex) -> f64 {
        let n = level.n as f64;
        match (*self, level.q) {
            (PotentialParams::Oscillator(p), q) => 4.0 * n + 2.0 - 2.0 * q.sign() * p.alpha,
            (PotentialParams::PoschlTeller(p), QuasiParity::Even) => -(p.b - 0.5 - n).powi(2),
            (PotentialParams::PoschlTeller(p), QuasiParity::Odd) => -(p.a - n).powi(2),
            (PotentialParams::Scarf(p), QuasiParity::Even) => -(p.a - n).powi(2),
            (PotentialParams::Scarf(p), QuasiParity::Odd) => -(p.b - 0.5 - n).powi(2),
        }
    }

    /// Levels of one tower; unbounded towers are cut after `limit` entries.
    pub fn tower(&self, q: QuasiParity, limit: usize) -> Vec<(LevelIndex, f64)> {
        let count = self.n_max(q).count().map_or(limit, |c| c.min(limit));
        (0..count as u32)
            .map(|n| {
                let level = LevelIndex::new(q, n);
                (level, self.energy_unchecked(level))
            })
            .collect()
    }

    /// Both towers, each cut at `limit_per_tower`, sorted by energy.
    pub fn levels(&self, limit_per_tower: usize) -> Vec<(LevelIndex, f64)> {
        let mut all: Vec<_> = QuasiParity::BOTH.iter().flat_map(|&q| self.tower(q, limit_per_tower)).collect();
        all.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        all
    }

    /// Every level with energy strictly below `cutoff`.
    pub fn levels_below(&self, cutoff: f64) -> Vec<(LevelIndex, f64)> {
        let mut out = Vec::new();
        for q in QuasiParity::BOTH {
            let mut n = 0u32;
            while self.n_max(q).contains(n) {
                let level = LevelIndex::new(q, n);
                let e = self.energy_unchecked(level);
                if e < cutoff {
                    out.push((level, e));
                } else if self.family() == Family::Oscillator {
                    // oscillator towers increase monotonically
                    break;
                }
                n += 1;
            }
        }
        out.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        out
    }

    /// Unnormalized eigenfunction with the proportionality constant set to 1.
    pub fn eigenfunction(&self, level: LevelIndex, x: f64) -> Result<C64, PotentialError> {
        Ok(self.eigenfunction_with_derivative(level, x)?.0)
    }

    /// Analytic `dψ/dx`.
    pub fn eigenfunction_derivative(&self, level: LevelIndex, x: f64) -> Result<C64, PotentialError> {
        Ok(self.eigenfunction_with_derivative(level, x)?.1)
    }

    /// `(ψ(x), ψ'(x))` in one pass.
    pub fn eigenfunction_with_derivative(&self, level: LevelIndex, x: f64) -> Result<(C64, C64), PotentialError> {
        let n_max = self.n_max(level.q);
        if !n_max.contains(level.n) {
            return Err(PotentialError::LevelOutOfRange { level, n_max });
        }
        let n = level.n as usize;
        let (psi, dpsi) = match *self {
            PotentialParams::Oscillator(p) => oscillator_state(p, level.q, n, x)?,
            PotentialParams::PoschlTeller(p) => poschl_teller_state(p, level.q, n, x)?,
            PotentialParams::Scarf(p) => scarf_state(p, level.q, n, x)?,
        };
        Ok((special::ensure_finite(psi, "eigenfunction")?, special::ensure_finite(dpsi, "eigenfunction derivative")?))
    }
}

// e^{-u²/2} u^{s} L_n^{(a)}(u²), u = x - iδ, s = -qα + 1/2, a = -qα
fn oscillator_state(p: OscillatorParams, q: QuasiParity, n: usize, x: f64) -> Result<(C64, C64), PotentialError> {
    if p.delta <= 0.0 {
        return Err(PotentialError::BranchCut(p.delta));
    }
    let u = C64::new(x, -p.delta);
    debug_assert!(u.im < 0.0);
    let order = -q.sign() * p.alpha;
    let s = order + 0.5;
    let u2 = u * u;
    let pref = (-u2 / 2.0).exp() * special::principal_power(u, s)?;
    let lag = laguerre(n, order, u2);
    let dlag = laguerre_derivative(n, order, u2);
    let psi = pref * lag;
    let dpsi = pref * ((-u + s / u) * lag + 2.0 * u * dlag);
    Ok((psi, dpsi))
}

// (y-1)^{p1} (y+1)^{p2} P_n^{(a,b)}(y), y = cosh τ, τ = x - iγ.
// The prefactors use (y-1) = 2 sinh²(τ/2), (y+1) = 2 cosh²(τ/2) so that the
// branch stays continuous along the real x axis.
fn poschl_teller_state(p: PoschlTellerParams, q: QuasiParity, n: usize, x: f64) -> Result<(C64, C64), PotentialError> {
    let (a, b) = (p.a, p.b);
    let (p1, p2, ja, jb) = match q {
        QuasiParity::Even => ((a - b + 1.0) / 2.0, -(a + b) / 2.0, a - b + 0.5, -a - b - 0.5),
        QuasiParity::Odd => ((b - a) / 2.0, -(b + a) / 2.0, b - a - 0.5, -b - a - 0.5),
    };
    let tau = C64::new(x, -p.gamma);
    let half = special::complex_hyperbolics(tau / 2.0);
    let ln2 = std::f64::consts::LN_2;
    let log_sinh = half.sinh.ln();
    let log_cosh = half.cosh.ln();
    let pref = (p1 * (ln2 + 2.0 * log_sinh) + p2 * (ln2 + 2.0 * log_cosh)).exp();
    let full = special::complex_hyperbolics(tau);
    let y = full.cosh;
    let poly = jacobi(n, ja, jb, y)?;
    let dpoly = jacobi_derivative(n, ja, jb, y)?;
    let dlog = p1 * half.coth()? + p2 * half.tanh()?;
    let psi = pref * poly;
    let dpsi = pref * (dlog * poly + dpoly * full.sinh);
    Ok((psi, dpsi))
}

// (sech x)^{e} exp(-i φ arctan(sinh x)) P_n^{(a,b)}(i sinh x)
fn scarf_state(p: ScarfParams, q: QuasiParity, n: usize, x: f64) -> Result<(C64, C64), PotentialError> {
    let (a, b) = (p.a, p.b);
    let (e, phi, ja, jb) = match q {
        QuasiParity::Even => (a, b, -a + b - 0.5, -a - b - 0.5),
        QuasiParity::Odd => (b - 0.5, a + 0.5, a - b + 0.5, -a - b - 0.5),
    };
    let sech = 1.0 / x.cosh();
    let tanh = x.tanh();
    let pref = sech.powf(e) * (-I * phi * x.sinh().atan()).exp();
    let y = I * x.sinh();
    let poly = jacobi(n, ja, jb, y)?;
    let dpoly = jacobi_derivative(n, ja, jb, y)?;
    let psi = pref * poly;
    let dpsi = pref * ((-e * tanh - I * phi * sech) * poly + dpoly * I * x.cosh());
    Ok((psi, dpsi))
}

/// Largest `|conj(V(-x)) - V(x)|` over a grid symmetric about the origin.
pub fn verify_pt_symmetry(params: &PotentialParams, points: &[f64]) -> Result<f64, PotentialError> {
    let n = points.len();
    let scale = points.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    for i in 0..n {
        if (points[i] + points[n - 1 - i]).abs() > 1e-12 * scale {
            return Err(PotentialError::AsymmetricGrid { index: i, x: points[i] });
        }
    }
    let mut worst = 0.0f64;
    for &x in points {
        let d = (params.potential_value(-x)?.conj() - params.potential_value(x)?).norm();
        worst = worst.max(d);
    }
    Ok(worst)
}
