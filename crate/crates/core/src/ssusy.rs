//! Second-derivative SUSY in the reducible case: supercharges
//! `𝒜⁺ = ∂² − 2p∂ + b` and `𝒜⁻ = ∂² + 2p∂ + 2p' + b` factorized through two
//! superpotentials built from `p(x)`.

use std::f64::consts::FRAC_PI_4;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::fd::FdAccuracy;
use crate::numerics::{Grid, NumericsError};
use crate::operators::{first_order, schrodinger_fd, second_order_fd, Derivative, Jet};
use crate::potentials::{Family, ParamError, PotentialParams, ValidationMode};
use crate::psusy::{build_triplet_with, Choice, PsusyError};
use crate::special::{complex_hyperbolics, SpecialError, C64};

/// `|p(x)|` below this is treated as a pole of `W1`, `W2` and `b`.
pub const P_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SsusyError {
    #[error("p(x) vanishes at x = {x} (|p| = {abs:e})")]
    Pole { x: f64, abs: f64 },
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Psusy(#[from] PsusyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Charge {
    /// `𝒜⁺ = q₁⁺q₂⁺`.
    Plus,
    /// `𝒜⁻ = q₂⁻q₁⁻`.
    Minus,
}

impl fmt::Display for Charge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Charge::Plus => "A+",
            Charge::Minus => "A-",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum PShape {
    /// `x − iδ`.
    Linear { delta: f64 },
    /// `k·tanh(τ/2) = k(coth τ − cosech τ)`, `τ = x − iγ`.
    HalfTanh { k: f64, gamma: f64 },
    /// `k(tanh x + i sech x)`.
    TanhSech { k: f64 },
}

/// `p`, `p'`, `p''` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PJet {
    pub p: C64,
    pub d1: C64,
    pub d2: C64,
}

impl PShape {
    pub fn eval(&self, x: f64) -> Result<PJet, SsusyError> {
        let jet = match *self {
            PShape::Linear { delta } => PJet { p: C64::new(x, -delta), d1: C64::new(1.0, 0.0), d2: C64::new(0.0, 0.0) },
            PShape::HalfTanh { k, gamma } => {
                let h = complex_hyperbolics(C64::new(x, -gamma) / 2.0);
                let t = h.tanh()?;
                let s2 = h.sech()?.powi(2);
                PJet { p: k * t, d1: 0.5 * k * s2, d2: -0.5 * k * s2 * t }
            }
            PShape::TanhSech { k } => {
                let t = x.tanh();
                let s = 1.0 / x.cosh();
                PJet {
                    p: k * C64::new(t, s),
                    d1: k * C64::new(s * s, -s * t),
                    d2: k * C64::new(-2.0 * s * s * t, -s * (s * s - t * t)),
                }
            }
        };
        if jet.p.norm() <= P_FLOOR {
            return Err(SsusyError::Pole { x, abs: jet.p.norm() });
        }
        Ok(jet)
    }
}

/// The reducible SSUSY data of one family and choice: `p`, `c`, `d = −c²/4`
/// and `a = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsusyData {
    pub params: PotentialParams,
    pub choice: Choice,
    pub p: PShape,
    pub c: f64,
    pub d: f64,
    pub a: f64,
}

/// Pointwise values of everything built from `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsusyPoint {
    pub p: PJet,
    pub w1: C64,
    pub w2: C64,
    pub dw1: C64,
    pub dw2: C64,
    pub b: C64,
    pub v1: C64,
    pub v2: C64,
}

pub fn ssusy_from_family(params: &PotentialParams, choice: Choice) -> Result<SsusyData, SsusyError> {
    ssusy_from_family_with(params, choice, ValidationMode::Strict)
}

pub fn ssusy_from_family_with(
    params: &PotentialParams,
    choice: Choice,
    mode: ValidationMode,
) -> Result<SsusyData, SsusyError> {
    params.validate(mode)?;
    let sign = match choice {
        Choice::First => 1.0,
        Choice::Second => -1.0,
    };
    let (p, c) = match *params {
        PotentialParams::Oscillator(o) => (PShape::Linear { delta: o.delta }, -sign * 4.0 * o.alpha),
        PotentialParams::PoschlTeller(o) => {
            let s = o.a + o.b - 0.5;
            (PShape::HalfTanh { k: 0.5 * s, gamma: o.gamma }, sign * s * (o.a - o.b + 0.5))
        }
        PotentialParams::Scarf(o) => {
            let s = o.a + o.b - 0.5;
            (PShape::TanhSech { k: 0.5 * s }, -sign * s * (o.a - o.b + 0.5))
        }
    };
    debug_assert!(match p {
        PShape::HalfTanh { gamma, .. } => gamma.abs() <= FRAC_PI_4,
        _ => true,
    });
    Ok(SsusyData { params: *params, choice, p, c, d: -c * c / 4.0, a: 0.0 })
}

impl SsusyData {
    pub fn family(&self) -> Family {
        self.params.family()
    }

    pub fn point(&self, x: f64) -> Result<SsusyPoint, SsusyError> {
        let pj = self.p.eval(x)?;
        let PJet { p, d1, d2 } = pj;
        let c = self.c;
        // W1,2 = p ∓ s with s = (2p' + c)/(4p)
        let s = (2.0 * d1 + c) / (4.0 * p);
        let ds = d2 / (2.0 * p) - (2.0 * d1 + c) * d1 / (4.0 * p * p);
        let r = d1 / (2.0 * p);
        let q = self.d / (4.0 * p * p);
        let b = -d1 + p * p - d2 / (2.0 * p) + r * r + q;
        let common = p * p + d2 / (2.0 * p) - r * r - q - self.a;
        Ok(SsusyPoint {
            p: pj,
            w1: p - s,
            w2: p + s,
            dw1: d1 - ds,
            dw2: d1 + ds,
            b,
            v1: common - 2.0 * d1,
            v2: common + 2.0 * d1,
        })
    }

    pub fn sample(&self, grid: &Grid) -> Result<Vec<SsusyPoint>, SsusyError> {
        grid.points().iter().map(|&x| self.point(x)).collect()
    }
}

/// `(W1, W2) = (p − (2p' + c)/(4p), p + (2p' + c)/(4p))`.
pub fn superpotentials_from_p(data: &SsusyData, x: f64) -> Result<(C64, C64), SsusyError> {
    let pt = data.point(x)?;
    Ok((pt.w1, pt.w2))
}

/// `b = −p' + p² − p''/(2p) + (p'/(2p))² + d/(4p²)`.
pub fn b_value(data: &SsusyData, x: f64) -> Result<C64, SsusyError> {
    Ok(data.point(x)?.b)
}

/// `V^(1,2) = ∓2p' + p² + p''/(2p) − (p'/(2p))² − d/(4p²) − a`.
pub fn v12_from_p(data: &SsusyData, x: f64) -> Result<(C64, C64), SsusyError> {
    let pt = data.point(x)?;
    Ok((pt.v1, pt.v2))
}

/// Source of `f'` and `f''` for a second-order charge.
#[derive(Debug, Clone, Copy)]
pub enum SecondDerivatives<'a> {
    Analytic { d1: &'a [C64], d2: &'a [C64] },
    FiniteDifference(FdAccuracy),
}

struct Coefficients {
    lead: Vec<C64>,
    first: Vec<C64>,
    zeroth: Vec<C64>,
}

fn charge_coefficients(which: Charge, pts: &[SsusyPoint]) -> Coefficients {
    let one = C64::new(1.0, 0.0);
    let (first, zeroth) = match which {
        Charge::Plus => (pts.iter().map(|s| -2.0 * s.p.p).collect(), pts.iter().map(|s| s.b).collect()),
        Charge::Minus => (pts.iter().map(|s| 2.0 * s.p.p).collect(), pts.iter().map(|s| 2.0 * s.p.d1 + s.b).collect()),
    };
    Coefficients { lead: vec![one; pts.len()], first, zeroth }
}

fn apply_coefficients(
    co: &Coefficients,
    f: &[C64],
    deriv: SecondDerivatives<'_>,
    h: f64,
) -> Result<Vec<C64>, NumericsError> {
    match deriv {
        SecondDerivatives::Analytic { d1, d2 } => {
            if d1.len() != f.len() || d2.len() != f.len() {
                return Err(NumericsError::LengthMismatch { expected: f.len(), got: d1.len().min(d2.len()) });
            }
            Ok((0..f.len()).map(|i| co.lead[i] * d2[i] + co.first[i] * d1[i] + co.zeroth[i] * f[i]).collect())
        }
        SecondDerivatives::FiniteDifference(acc) => second_order_fd(&co.lead, &co.first, &co.zeroth, f, h, acc),
    }
}

/// `𝒜⁺f = f'' − 2pf' + bf` or `𝒜⁻f = f'' + 2pf' + (2p' + b)f`.
pub fn apply_charge(
    data: &SsusyData,
    which: Charge,
    grid: &Grid,
    f: &[C64],
    deriv: SecondDerivatives<'_>,
) -> Result<Vec<C64>, SsusyError> {
    grid.check_len(f)?;
    let pts = data.sample(grid)?;
    Ok(apply_coefficients(&charge_coefficients(which, &pts), f, deriv, grid.h())?)
}

fn column<F: Fn(&SsusyPoint) -> C64>(pts: &[SsusyPoint], f: F) -> Vec<C64> {
    pts.iter().map(f).collect()
}

fn diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn check_jets(fs: &[Jet], grid: &Grid) -> Result<(), SsusyError> {
    for f in fs {
        f.check(grid)?;
    }
    Ok(())
}

/// `max |𝒜⁺f − q₁⁺(q₂⁺f)|` and `max |𝒜⁻f − q₂⁻(q₁⁻f)|` with
/// `q_i^± = ∓∂ + W_i`. The inner `q` uses exact derivatives; the outer one
/// uses finite differences of accuracy `acc`, or exact derivatives when
/// `acc` is `None`.
pub fn factorization_residual(
    data: &SsusyData,
    fs: &[Jet],
    grid: &Grid,
    acc: Option<FdAccuracy>,
) -> Result<f64, SsusyError> {
    check_jets(fs, grid)?;
    let pts = data.sample(grid)?;
    let h = grid.h();
    let (w1, w2) = (column(&pts, |s| s.w1), column(&pts, |s| s.w2));
    let (dw1, dw2) = (column(&pts, |s| s.dw1), column(&pts, |s| s.dw2));
    let plus = charge_coefficients(Charge::Plus, &pts);
    let minus = charge_coefficients(Charge::Minus, &pts);
    let mut worst = 0.0f64;
    for f in fs {
        let exact = SecondDerivatives::Analytic { d1: &f.d1, d2: &f.d2 };
        let n = f.len();
        // q f = σf' + W f and (q f)' = σf'' + W'f + W f'
        let layer = |sign: f64, w: &[C64], dw: &[C64], outer_sign: f64, outer_w: &[C64]| {
            let inner: Vec<C64> = (0..n).map(|i| sign * f.d1[i] + w[i] * f.f[i]).collect();
            let d_inner: Vec<C64> = (0..n).map(|i| sign * f.d2[i] + dw[i] * f.f[i] + w[i] * f.d1[i]).collect();
            let deriv = match acc {
                Some(a) => Derivative::FiniteDifference(a),
                None => Derivative::Analytic(&d_inner),
            };
            first_order(outer_sign, outer_w, &inner, deriv, h)
        };
        let a_plus = apply_coefficients(&plus, &f.f, exact, h)?;
        worst = worst.max(diff(&a_plus, &layer(-1.0, &w2, &dw2, -1.0, &w1)?));
        let a_minus = apply_coefficients(&minus, &f.f, exact, h)?;
        worst = worst.max(diff(&a_minus, &layer(1.0, &w1, &dw1, 1.0, &w2)?));
    }
    Ok(worst)
}

/// `K = H² − c²/4` blockwise: `𝒜⁺𝒜⁻f` against `(h⁽¹⁾ + c/2)(h⁽¹⁾ − c/2)f` and
/// `𝒜⁻𝒜⁺f` against `(h⁽²⁾ − c/2)(h⁽²⁾ + c/2)f`. Inner factors exact, outer
/// factors by finite differences.
pub fn quasi_hamiltonian_residual(
    data: &SsusyData,
    fs: &[Jet],
    grid: &Grid,
    acc: FdAccuracy,
) -> Result<f64, SsusyError> {
    check_jets(fs, grid)?;
    let pts = data.sample(grid)?;
    let h = grid.h();
    let half = data.c / 2.0;
    let plus = charge_coefficients(Charge::Plus, &pts);
    let minus = charge_coefficients(Charge::Minus, &pts);
    let v1 = column(&pts, |s| s.v1);
    let v2 = column(&pts, |s| s.v2);
    let shifted = |v: &[C64], k: f64| -> Vec<C64> { v.iter().map(|z| z + k).collect() };
    let fd = SecondDerivatives::FiniteDifference(acc);
    let mut worst = 0.0f64;
    for f in fs {
        let exact = SecondDerivatives::Analytic { d1: &f.d1, d2: &f.d2 };
        let lhs = apply_coefficients(&plus, &apply_coefficients(&minus, &f.f, exact, h)?, fd, h)?;
        let inner: Vec<C64> = (0..f.len()).map(|i| -f.d2[i] + (v1[i] - half) * f.f[i]).collect();
        let rhs = schrodinger_fd(&shifted(&v1, half), &inner, h, acc)?;
        worst = worst.max(diff(&lhs, &rhs));

        let lhs = apply_coefficients(&minus, &apply_coefficients(&plus, &f.f, exact, h)?, fd, h)?;
        let inner: Vec<C64> = (0..f.len()).map(|i| -f.d2[i] + (v2[i] + half) * f.f[i]).collect();
        let rhs = schrodinger_fd(&shifted(&v2, -half), &inner, h, acc)?;
        worst = worst.max(diff(&lhs, &rhs));
    }
    Ok(worst)
}

/// `max |(q₂⁺q₂⁻ − c/2)f − (q₁⁻q₁⁺ + c/2)f|`: both sides of the intermediate
/// Hamiltonian, evaluated exactly from the jets.
pub fn constraint_corollary_residual(data: &SsusyData, fs: &[Jet], grid: &Grid) -> Result<f64, SsusyError> {
    check_jets(fs, grid)?;
    let pts = data.sample(grid)?;
    let half = data.c / 2.0;
    let mut worst = 0.0f64;
    for f in fs {
        for (i, s) in pts.iter().enumerate() {
            let lhs = -f.d2[i] + (s.w2 * s.w2 - s.dw2 - half) * f.f[i];
            let rhs = -f.d2[i] + (s.w1 * s.w1 + s.dw1 + half) * f.f[i];
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}

/// `max |𝒜⁻(h⁽¹⁾f) − h⁽²⁾(𝒜⁻f)|` together with the mirror
/// `max |𝒜⁺(h⁽²⁾f) − h⁽¹⁾(𝒜⁺f)|`.
pub fn intertwining_residual(data: &SsusyData, f: &Jet, grid: &Grid, acc: FdAccuracy) -> Result<f64, SsusyError> {
    check_jets(std::slice::from_ref(f), grid)?;
    let pts = data.sample(grid)?;
    let h = grid.h();
    let v1 = column(&pts, |s| s.v1);
    let v2 = column(&pts, |s| s.v2);
    let fd = SecondDerivatives::FiniteDifference(acc);
    let exact = SecondDerivatives::Analytic { d1: &f.d1, d2: &f.d2 };
    let mut worst = 0.0f64;
    for (which, v_in, v_out) in [(Charge::Minus, &v1, &v2), (Charge::Plus, &v2, &v1)] {
        let co = charge_coefficients(which, &pts);
        let h_f: Vec<C64> = (0..f.len()).map(|i| -f.d2[i] + v_in[i] * f.f[i]).collect();
        let lhs = apply_coefficients(&co, &h_f, fd, h)?;
        let rhs = schrodinger_fd(v_out, &apply_coefficients(&co, &f.f, exact, h)?, h, acc)?;
        worst = worst.max(diff(&lhs, &rhs));
    }
    Ok(worst)
}

/// Largest deviation between the `(W1, W2)` built from `p` and the PSUSY
/// triplet's superpotentials, including `|c − (c1 − c2)|`.
pub fn consistency_with_psusy(
    params: &PotentialParams,
    choice: Choice,
    grid: &Grid,
    mode: ValidationMode,
) -> Result<f64, SsusyError> {
    let data = ssusy_from_family_with(params, choice, mode)?;
    let triplet = build_triplet_with(params, choice, mode)?;
    let mut worst = (data.c - triplet.c()).abs();
    for &x in grid.points() {
        let (w1, w2) = superpotentials_from_p(&data, x)?;
        let t1 = triplet.w1.value(x).map_err(PsusyError::from)?;
        let t2 = triplet.w2.value(x).map_err(PsusyError::from)?;
        worst = worst.max((w1 - t1).norm()).max((w2 - t2).norm());
    }
    Ok(worst)
}

/// `max |W2² − W1² − W1' − W2' − c|` with the superpotentials built from `p`.
pub fn constraint_residual(data: &SsusyData, grid: &Grid) -> Result<f64, SsusyError> {
    let mut worst = 0.0f64;
    for s in data.sample(grid)? {
        worst = worst.max((s.w2 * s.w2 - s.w1 * s.w1 - s.dw1 - s.dw2 - data.c).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::max_abs;
    use crate::operators::standard_packets;
    use crate::psusy::build_triplet;

    fn osc(a: f64) -> PotentialParams {
        PotentialParams::oscillator(a, 1.0)
    }
    fn pt() -> PotentialParams {
        PotentialParams::poschl_teller(1.2, 3.9, 0.3)
    }
    fn scarf() -> PotentialParams {
        PotentialParams::scarf(2.3, 1.4)
    }

    fn all_data() -> Vec<SsusyData> {
        let mut out = Vec::new();
        for p in [osc(2.5), pt(), scarf()] {
            for ch in Choice::BOTH {
                out.push(ssusy_from_family(&p, ch).unwrap());
            }
        }
        out
    }

    fn jets(g: &Grid) -> Vec<Jet> {
        standard_packets().iter().map(|p| p.jet(g)).collect()
    }

    #[test]
    fn c_examples() {
        let d = ssusy_from_family(&osc(2.5), Choice::First).unwrap();
        assert_eq!(d.c, -10.0);
        assert_eq!(d.d, -25.0);
        assert_eq!(d.p.eval(0.0).unwrap().p, C64::new(0.0, -1.0));
        let d = ssusy_from_family(&pt(), Choice::First).unwrap();
        assert!((d.c + 10.12).abs() < 1e-12);
        let d = ssusy_from_family(&scarf(), Choice::First).unwrap();
        assert!((d.c + 4.48).abs() < 1e-12);
    }

    #[test]
    fn choice_flip_keeps_p_and_negates_c() {
        let g = Grid::new(6.0, 101).unwrap();
        for p in [pt(), scarf(), osc(2.5)] {
            let a = ssusy_from_family(&p, Choice::First).unwrap();
            let b = ssusy_from_family(&p, Choice::Second).unwrap();
            assert_eq!(a.c, -b.c);
            for &x in g.points() {
                assert!((a.p.eval(x).unwrap().p - b.p.eval(x).unwrap().p).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn pt_p_equals_coth_minus_cosech() {
        let d = ssusy_from_family(&pt(), Choice::First).unwrap();
        for &x in &[-3.0, -0.5, 0.0, 0.7, 4.0] {
            let h = complex_hyperbolics(C64::new(x, -0.3));
            let direct = 0.5 * (1.2 + 3.9 - 0.5) * (h.coth().unwrap() - h.cosech().unwrap());
            assert!((d.p.eval(x).unwrap().p - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn p_derivatives_match_fd() {
        let eps = 1e-5;
        for d in all_data() {
            for &x in &[-2.0, -0.4, 0.0, 1.1] {
                let j = d.p.eval(x).unwrap();
                let (lo, hi) = (d.p.eval(x - eps).unwrap(), d.p.eval(x + eps).unwrap());
                assert!((j.d1 - (hi.p - lo.p) / (2.0 * eps)).norm() < 1e-8);
                assert!((j.d2 - (hi.d1 - lo.d1) / (2.0 * eps)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn oscillator_hand_values() {
        let d = ssusy_from_family(&osc(2.5), Choice::First).unwrap();
        let (w1, _) = superpotentials_from_p(&d, 0.0).unwrap();
        // u + (α − ½)/u at u = −i
        assert!((w1 - C64::new(0.0, 1.0)).norm() < 1e-14);
        assert!((b_value(&d, 0.0).unwrap() - C64::new(2.5 * 2.5 - 2.25, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn constant_p_seam() {
        let k = 1.7;
        let data = SsusyData {
            params: osc(2.5),
            choice: Choice::First,
            p: PShape::TanhSech { k: 0.0 },
            c: 3.0,
            d: -2.25,
            a: 0.0,
        };
        // p ≡ k by hand: every derivative term drops out
        let p = C64::new(k, 0.0);
        let b = p * p + data.d / (4.0 * p * p);
        assert!((b - C64::new(k * k - 2.25 / (4.0 * k * k), 0.0)).norm() < 1e-15);
        assert!(matches!(data.point(0.3), Err(SsusyError::Pole { .. })));
    }

    #[test]
    fn pointwise_identities() {
        let g = Grid::new(6.0, 241).unwrap();
        for d in all_data() {
            for &x in g.points() {
                let s = d.point(x).unwrap();
                let p = s.p;
                assert!((s.w1 + s.w2 - 2.0 * p.p).norm() < 1e-12);
                assert!((s.w2 - s.w1 - (2.0 * p.d1 + d.c) / (2.0 * p.p)).norm() < 1e-12 * (1.0 + d.c.abs()));
                assert!((s.v1 - s.v2 + 4.0 * p.d1).norm() < 1e-12);
                let v1 = s.w1 * s.w1 - s.dw1 + d.c / 2.0;
                let v2 = s.w2 * s.w2 + s.dw2 - d.c / 2.0;
                assert!((s.v1 - v1).norm() < 1e-11 && (s.v2 - v2).norm() < 1e-11, "{d:?} {x}");
                assert!((s.b - (s.w1 * s.w2 - s.dw2)).norm() < 1e-11);
            }
            assert!(constraint_residual(&d, &g).unwrap() < 1e-10);
        }
    }

    #[test]
    fn v1_is_shifted_family_potential() {
        let d = ssusy_from_family(&osc(2.5), Choice::First).unwrap();
        for &x in &[-3.0, 0.0, 1.4] {
            let (v1, _) = v12_from_p(&d, x).unwrap();
            let off = v1 - osc(2.5).potential_value(x).unwrap();
            assert!((off - C64::new(-2.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn matches_psusy_triplets() {
        let g = Grid::new(8.0, 401).unwrap();
        for p in [osc(2.5), pt(), scarf()] {
            for ch in Choice::BOTH {
                let r = consistency_with_psusy(&p, ch, &g, ValidationMode::Strict).unwrap();
                assert!(r < 1e-12, "{p:?} {ch}: {r}");
                let t = build_triplet(&p, ch).unwrap();
                let d = ssusy_from_family(&p, ch).unwrap();
                assert!((crate::psusy::constraint_residual(&t, &g).unwrap() - 0.0).abs() < 1e-10);
                assert!(constraint_residual(&d, &g).unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn charge_modes_agree() {
        let at = |h: f64| {
            let g = Grid::with_spacing(8.0, h).unwrap();
            let d = ssusy_from_family(&scarf(), Choice::First).unwrap();
            let f = standard_packets()[0].jet(&g);
            let a =
                apply_charge(&d, Charge::Plus, &g, &f.f, SecondDerivatives::Analytic { d1: &f.d1, d2: &f.d2 }).unwrap();
            let b = apply_charge(&d, Charge::Plus, &g, &f.f, SecondDerivatives::FiniteDifference(FdAccuracy::Second))
                .unwrap();
            diff(&a, &b)
        };
        let ratio = at(0.01) / at(0.005);
        assert!((3.5..4.5).contains(&ratio), "{ratio}");
    }

    #[test]
    fn zero_function_is_zero() {
        let g = Grid::new(6.0, 120).unwrap();
        let z = vec![Jet::zeros(120)];
        for d in all_data() {
            assert_eq!(factorization_residual(&d, &z, &g, Some(FdAccuracy::Second)).unwrap(), 0.0);
            assert_eq!(quasi_hamiltonian_residual(&d, &z, &g, FdAccuracy::Second).unwrap(), 0.0);
            assert_eq!(intertwining_residual(&d, &z[0], &g, FdAccuracy::Second).unwrap(), 0.0);
            let out =
                apply_charge(&d, Charge::Minus, &g, &z[0].f, SecondDerivatives::FiniteDifference(FdAccuracy::Fourth))
                    .unwrap();
            assert_eq!(max_abs(&out), 0.0);
        }
    }

    fn at_spacing<F: Fn(&SsusyData, &[Jet], &Grid) -> f64>(d: &SsusyData, h: f64, f: F) -> f64 {
        let g = Grid::with_spacing(8.0, h).unwrap();
        f(d, &jets(&g), &g)
    }

    fn assert_second_order<F: Fn(&SsusyData, &[Jet], &Grid) -> f64>(d: &SsusyData, what: &str, f: F) {
        let ratio = at_spacing(d, 0.01, &f) / at_spacing(d, 0.005, &f);
        assert!((3.5..4.5).contains(&ratio), "{what} {:?} {}: ratio {ratio}", d.family(), d.choice);
    }

    // the narrow Pöschl-Teller core keeps its truncation error above the
    // absolute bounds at h = 0.005; there only the convergence rate is checked
    fn has_absolute_bound(d: &SsusyData) -> bool {
        d.family() != Family::PoschlTeller
    }

    #[test]
    fn factorization_residual_bounds() {
        let fact = |acc| move |d: &SsusyData, fs: &[Jet], g: &Grid| factorization_residual(d, fs, g, acc).unwrap();
        for d in all_data() {
            assert_second_order(&d, "factorization", fact(Some(FdAccuracy::Second)));
            let r = at_spacing(&d, 0.005, fact(None));
            assert!(r < 1e-8, "{:?} {}: {r:e}", d.family(), d.choice);
        }
        for ch in Choice::BOTH {
            let d = ssusy_from_family(&scarf(), ch).unwrap();
            let r = at_spacing(&d, 0.005, fact(Some(FdAccuracy::Second)));
            assert!(r < 1e-4, "{ch}: {r:e}");
        }
    }

    #[test]
    fn quasi_hamiltonian_bounds() {
        let quasi = |acc| move |d: &SsusyData, fs: &[Jet], g: &Grid| quasi_hamiltonian_residual(d, fs, g, acc).unwrap();
        for d in all_data() {
            assert_second_order(&d, "quasi-hamiltonian", quasi(FdAccuracy::Second));
            if has_absolute_bound(&d) {
                let r = at_spacing(&d, 0.005, quasi(FdAccuracy::Fourth));
                assert!(r < 1e-6, "{:?} {}: {r:e}", d.family(), d.choice);
            }
        }
    }

    #[test]
    fn intermediate_hamiltonian_agrees() {
        let g = Grid::with_spacing(8.0, 0.005).unwrap();
        let fs = jets(&g);
        for d in all_data() {
            let r = constraint_corollary_residual(&d, &fs, &g).unwrap();
            assert!(r < 1e-10, "{:?} {}: {r:e}", d.family(), d.choice);
        }
    }

    #[test]
    fn scarf_intertwining_bound() {
        let g = Grid::with_spacing(8.0, 0.005).unwrap();
        for ch in Choice::BOTH {
            let d = ssusy_from_family(&scarf(), ch).unwrap();
            for f in jets(&g) {
                let r = intertwining_residual(&d, &f, &g, FdAccuracy::Second).unwrap();
                assert!(r < 1e-3, "{ch}: {r:e}");
            }
        }
    }

    #[test]
    fn intertwining_converges_quadratically() {
        for d in all_data() {
            let r: Vec<f64> = [0.02, 0.01, 0.005]
                .iter()
                .map(|&h| {
                    let g = Grid::with_spacing(8.0, h).unwrap();
                    jets(&g)
                        .iter()
                        .map(|f| intertwining_residual(&d, f, &g, FdAccuracy::Second).unwrap())
                        .fold(0.0, f64::max)
                })
                .collect();
            for w in r.windows(2) {
                assert!((3.5..4.5).contains(&(w[0] / w[1])), "{:?} {}: {r:?}", d.family(), d.choice);
            }
        }
    }

    #[test]
    fn constant_shift_commutes() {
        // a constant κ commutes with 𝒜⁻ exactly; on the grid the only change
        // is κ times the finite-difference error of the outer 𝒜⁻
        let g = Grid::with_spacing(8.0, 0.01).unwrap();
        let d = ssusy_from_family(&osc(2.5), Choice::First).unwrap();
        let f = standard_packets()[1].jet(&g);
        let kappa = 0.75;
        let shifted = SsusyData { a: -kappa, ..d };
        let base = intertwining_residual(&d, &f, &g, FdAccuracy::Fourth).unwrap();
        let r = intertwining_residual(&shifted, &f, &g, FdAccuracy::Fourth).unwrap();
        let exact = SecondDerivatives::Analytic { d1: &f.d1, d2: &f.d2 };
        let mode_gap = |ch| {
            let a = apply_charge(&d, ch, &g, &f.f, exact).unwrap();
            let b = apply_charge(&d, ch, &g, &f.f, SecondDerivatives::FiniteDifference(FdAccuracy::Fourth)).unwrap();
            diff(&a, &b)
        };
        let bound = kappa * mode_gap(Charge::Plus).max(mode_gap(Charge::Minus)) + 1e-12;
        assert!((r - base).abs() <= bound, "{base:e} {r:e} {bound:e}");
    }
}
