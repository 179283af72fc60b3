//! First-order SUSY: superpotentials, factorization energies, the operators
//! `A = d/dx + W` and `Ā = -d/dx + W`, partner potentials and their
//! parameter-shift identities.

use std::f64::consts::FRAC_PI_4;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::fd::FdAccuracy;
use crate::numerics::{interior_max, max_abs, Grid, NumericsError};
use crate::operators::{first_order, schrodinger_fd, Derivative, Jet};
use crate::potentials::{Family, LevelIndex, ParamError, PotentialError, PotentialParams, ValidationMode};
use crate::special::{self, SpecialError, C64};

/// Share of the half-width kept by the annihilation check.
pub const ANNIHILATION_INTERIOR: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    W,
    WPrime,
    /// Oscillator only.
    WDoublePrime,
    /// Oscillator only.
    WTriplePrime,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::W, Variant::WPrime, Variant::WDoublePrime, Variant::WTriplePrime];

    pub fn for_family(family: Family) -> &'static [Variant] {
        match family {
            Family::Oscillator => &Self::ALL,
            _ => &Self::ALL[..2],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::W => "W",
            Variant::WPrime => "W'",
            Variant::WDoublePrime => "W''",
            Variant::WTriplePrime => "W'''",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SusyError {
    #[error("variant {variant} exists only for the oscillator family (got {family})")]
    VariantFamily { variant: Variant, family: Family },
    #[error("superpotential parameters are not usable: {0}")]
    Construction(String),
    #[error("shift leaves family domain: {0}")]
    ShiftLeavesDomain(ParamError),
    #[error("{variant} annihilates {expected}, not {got}")]
    NotAnnihilated { variant: Variant, expected: LevelIndex, got: LevelIndex },
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Parameters and additive constant of one side of a partner map:
/// `V±(x) = V^{params}(x) + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartnerSide {
    pub params: PotentialParams,
    pub offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartnerMap {
    pub plus: PartnerSide,
    pub minus: PartnerSide,
}

/// One superpotential: a variant attached to a parameter record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuperpotentialSpec {
    variant: Variant,
    params: PotentialParams,
}

// closed forms share three shapes:
//   oscillator  u + k/u,                 u = x - iδ
//   PT          P coth τ - Q cosech τ,   τ = x - iγ
//   Scarf       P tanh x + i Q sech x
#[derive(Debug, Clone, Copy)]
enum Shape {
    Oscillator { k: f64, delta: f64 },
    Hyperbolic { p: f64, q: f64, gamma: f64 },
    Scarf { p: f64, q: f64 },
}

fn finite(name: &'static str, v: f64) -> Result<(), SusyError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(SusyError::Construction(format!("{name} is not finite")))
    }
}

impl SuperpotentialSpec {
    /// Accepts any finite parameter record whose superpotential is pole-free
    /// on the real line; the shifted records used by PSUSY triplets may lie
    /// outside the strict family domain.
    pub fn new(variant: Variant, params: PotentialParams) -> Result<Self, SusyError> {
        let family = params.family();
        if !Variant::for_family(family).contains(&variant) {
            return Err(SusyError::VariantFamily { variant, family });
        }
        match params {
            PotentialParams::Oscillator(p) => {
                finite("alpha", p.alpha)?;
                finite("delta", p.delta)?;
                if p.delta <= 0.0 {
                    return Err(SusyError::Construction(format!("delta must be positive (got {})", p.delta)));
                }
            }
            PotentialParams::PoschlTeller(p) => {
                finite("A", p.a)?;
                finite("B", p.b)?;
                finite("gamma", p.gamma)?;
                if p.gamma == 0.0 || p.gamma.abs() > FRAC_PI_4 {
                    return Err(SusyError::Construction(format!(
                        "gamma must be nonzero with |gamma| <= pi/4 (got {})",
                        p.gamma
                    )));
                }
            }
            PotentialParams::Scarf(p) => {
                finite("A", p.a)?;
                finite("B", p.b)?;
            }
        }
        Ok(Self { variant, params })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn params(&self) -> &PotentialParams {
        &self.params
    }

    pub fn family(&self) -> Family {
        self.params.family()
    }

    fn shape(&self) -> Shape {
        match (self.params, self.variant) {
            (PotentialParams::Oscillator(p), v) => {
                let a = p.alpha;
                let k = match v {
                    Variant::W => a - 0.5,
                    Variant::WPrime => -(a + 0.5),
                    Variant::WDoublePrime => a + 0.5,
                    Variant::WTriplePrime => -(a - 0.5),
                };
                Shape::Oscillator { k, delta: p.delta }
            }
            (PotentialParams::PoschlTeller(p), Variant::W) => {
                Shape::Hyperbolic { p: p.b - 0.5, q: p.a + 0.5, gamma: p.gamma }
            }
            (PotentialParams::PoschlTeller(p), _) => Shape::Hyperbolic { p: p.a, q: p.b, gamma: p.gamma },
            (PotentialParams::Scarf(p), Variant::W) => Shape::Scarf { p: p.a, q: p.b },
            (PotentialParams::Scarf(p), _) => Shape::Scarf { p: p.b - 0.5, q: p.a + 0.5 },
        }
    }

    /// `(W(x), W'(x))`.
    pub fn value_and_derivative(&self, x: f64) -> Result<(C64, C64), SusyError> {
        let (w, dw) = match self.shape() {
            Shape::Oscillator { k, delta } => {
                let u = C64::new(x, -delta);
                (u + k / u, 1.0 - k / (u * u))
            }
            Shape::Hyperbolic { p, q, gamma } => {
                let h = special::complex_hyperbolics(C64::new(x, -gamma));
                let coth = h.coth()?;
                let cosech = h.cosech()?;
                (p * coth - q * cosech, -p * cosech * cosech + q * cosech * coth)
            }
            Shape::Scarf { p, q } => {
                let sech = 1.0 / x.cosh();
                let tanh = x.tanh();
                (C64::new(p * tanh, q * sech), C64::new(p * sech * sech, -q * sech * tanh))
            }
        };
        special::ensure_finite(w, "superpotential")?;
        special::ensure_finite(dw, "superpotential derivative")?;
        Ok((w, dw))
    }

    pub fn value(&self, x: f64) -> Result<C64, SusyError> {
        Ok(self.value_and_derivative(x)?.0)
    }

    pub fn derivative(&self, x: f64) -> Result<C64, SusyError> {
        Ok(self.value_and_derivative(x)?.1)
    }

    pub fn factorization_energy(&self) -> f64 {
        match (self.params, self.variant) {
            (PotentialParams::Oscillator(p), Variant::W) => 2.0 - 2.0 * p.alpha,
            (PotentialParams::Oscillator(p), Variant::WPrime) => 2.0 + 2.0 * p.alpha,
            (PotentialParams::Oscillator(p), Variant::WDoublePrime) => -2.0 * p.alpha,
            (PotentialParams::Oscillator(p), Variant::WTriplePrime) => 2.0 * p.alpha,
            (PotentialParams::PoschlTeller(p), Variant::W) => -(p.b - 0.5).powi(2),
            (PotentialParams::PoschlTeller(p), _) => -p.a * p.a,
            (PotentialParams::Scarf(p), Variant::W) => -p.a * p.a,
            (PotentialParams::Scarf(p), _) => -(p.b - 0.5).powi(2),
        }
    }

    /// `V± = W² ∓ W' + E`.
    pub fn partner_potentials(&self, x: f64) -> Result<(C64, C64), SusyError> {
        let (w, dw) = self.value_and_derivative(x)?;
        let e = self.factorization_energy();
        Ok((w * w - dw + e, w * w + dw + e))
    }

    /// Closed-form identification of `V±` with shifted family potentials.
    pub fn partner_map(&self) -> PartnerMap {
        let same = PartnerSide { params: self.params, offset: 0.0 };
        match self.params {
            PotentialParams::Oscillator(p) => {
                let osc = |alpha: f64, offset: f64| PartnerSide {
                    params: PotentialParams::oscillator(alpha, p.delta),
                    offset,
                };
                let a = p.alpha;
                match self.variant {
                    Variant::W => PartnerMap { plus: same, minus: osc(a - 1.0, 2.0) },
                    Variant::WPrime => PartnerMap { plus: same, minus: osc(a + 1.0, 2.0) },
                    Variant::WDoublePrime => PartnerMap { plus: osc(a + 1.0, 0.0), minus: osc(a, 2.0) },
                    Variant::WTriplePrime => PartnerMap { plus: osc(a - 1.0, 0.0), minus: osc(a, 2.0) },
                }
            }
            PotentialParams::PoschlTeller(p) => {
                let minus = match self.variant {
                    Variant::W => PotentialParams::poschl_teller(p.a, p.b - 1.0, p.gamma),
                    _ => PotentialParams::poschl_teller(p.a - 1.0, p.b, p.gamma),
                };
                PartnerMap { plus: same, minus: PartnerSide { params: minus, offset: 0.0 } }
            }
            PotentialParams::Scarf(p) => {
                let minus = match self.variant {
                    Variant::W => PotentialParams::scarf(p.a - 1.0, p.b),
                    _ => PotentialParams::scarf(p.a, p.b - 1.0),
                };
                PartnerMap { plus: same, minus: PartnerSide { params: minus, offset: 0.0 } }
            }
        }
    }

    /// The level of `V+` sent to zero by `A`.
    pub fn annihilated_level(&self) -> LevelIndex {
        match self.variant {
            Variant::W | Variant::WDoublePrime => LevelIndex::even(0),
            Variant::WPrime | Variant::WTriplePrime => LevelIndex::odd(0),
        }
    }

    pub fn sample(&self, grid: &Grid) -> Result<(Vec<C64>, Vec<C64>), SusyError> {
        let mut w = Vec::with_capacity(grid.n());
        let mut dw = Vec::with_capacity(grid.n());
        for &x in grid.points() {
            let (a, b) = self.value_and_derivative(x)?;
            w.push(a);
            dw.push(b);
        }
        Ok((w, dw))
    }

    /// `A f = f' + W f`.
    pub fn apply_a(&self, grid: &Grid, f: &[C64], deriv: Derivative<'_>) -> Result<Vec<C64>, SusyError> {
        grid.check_len(f)?;
        let (w, _) = self.sample(grid)?;
        Ok(first_order(1.0, &w, f, deriv, grid.h())?)
    }

    /// `Ā f = -f' + W f`.
    pub fn apply_a_bar(&self, grid: &Grid, f: &[C64], deriv: Derivative<'_>) -> Result<Vec<C64>, SusyError> {
        grid.check_len(f)?;
        let (w, _) = self.sample(grid)?;
        Ok(first_order(-1.0, &w, f, deriv, grid.h())?)
    }
}

/// `max |V± - (V^{shifted} + offset)|` over the grid, both sides; fails when
/// a shifted record leaves its family domain.
pub fn verify_partner_map(spec: &SuperpotentialSpec, grid: &Grid) -> Result<(PartnerMap, f64), SusyError> {
    let map = spec.partner_map();
    for side in [map.plus, map.minus] {
        side.params.validate(ValidationMode::Limiting).map_err(SusyError::ShiftLeavesDomain)?;
    }
    let mut worst = 0.0f64;
    for &x in grid.points() {
        let (vp, vm) = spec.partner_potentials(x)?;
        let ep = map.plus.params.potential_value(x)? + map.plus.offset;
        let em = map.minus.params.potential_value(x)? + map.minus.offset;
        worst = worst.max((vp - ep).norm()).max((vm - em).norm());
    }
    Ok((map, worst))
}

/// `max |Aψ| / max |ψ|` over `|x| <= 0.95 L` for the annihilated state,
/// using the analytic eigenfunction derivative.
pub fn annihilation_residual(spec: &SuperpotentialSpec, level: LevelIndex, grid: &Grid) -> Result<f64, SusyError> {
    let expected = spec.annihilated_level();
    if level != expected {
        return Err(SusyError::NotAnnihilated { variant: spec.variant, expected, got: level });
    }
    let params = spec.partner_map().plus.params;
    let mut psi = Vec::with_capacity(grid.n());
    let mut dpsi = Vec::with_capacity(grid.n());
    for &x in grid.points() {
        let (a, b) = params.eigenfunction_with_derivative(level, x)?;
        psi.push(a);
        dpsi.push(b);
    }
    let a_psi = spec.apply_a(grid, &psi, Derivative::Analytic(&dpsi))?;
    let num = interior_max(grid, &a_psi, ANNIHILATION_INTERIOR);
    let den = interior_max(grid, &psi, ANNIHILATION_INTERIOR);
    Ok(num / den)
}

/// `max |A(H₊f) − H₋(Af)|` with `H± = -d²/dx² + V±`. Inner operators use
/// the jet's exact derivatives; the outer `H₋` uses a finite-difference
/// second derivative of accuracy `acc`, the outer `A` a fourth-order one.
pub fn intertwining_residual(
    spec: &SuperpotentialSpec,
    f: &Jet,
    grid: &Grid,
    acc: FdAccuracy,
) -> Result<f64, SusyError> {
    f.check(grid)?;
    let n = grid.n();
    let (w, dw) = spec.sample(grid)?;
    let e = spec.factorization_energy();
    let v_plus: Vec<C64> = (0..n).map(|i| w[i] * w[i] - dw[i] + e).collect();
    let v_minus: Vec<C64> = (0..n).map(|i| w[i] * w[i] + dw[i] + e).collect();
    let h_plus_f: Vec<C64> = (0..n).map(|i| -f.d2[i] + v_plus[i] * f.f[i]).collect();
    let lhs = first_order(1.0, &w, &h_plus_f, Derivative::FiniteDifference(FdAccuracy::Fourth), grid.h())?;
    let a_f = first_order(1.0, &w, &f.f, Derivative::Analytic(&f.d1), grid.h())?;
    let rhs = schrodinger_fd(&v_minus, &a_f, grid.h(), acc)?;
    let diff: Vec<C64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    Ok(max_abs(&diff))
}

/// `max |W″^{(α)} − W^{(α+1)}|` and `max |W‴^{(α)} − W′^{(α−1)}|` on the grid.
pub fn footnote_equivalence(alpha: f64, delta: f64, grid: &Grid) -> Result<(f64, f64), SusyError> {
    let osc = |a: f64| PotentialParams::oscillator(a, delta);
    let wpp = SuperpotentialSpec::new(Variant::WDoublePrime, osc(alpha))?;
    let w_up = SuperpotentialSpec::new(Variant::W, osc(alpha + 1.0))?;
    let wppp = SuperpotentialSpec::new(Variant::WTriplePrime, osc(alpha))?;
    let wp_down = SuperpotentialSpec::new(Variant::WPrime, osc(alpha - 1.0))?;
    let mut d1 = 0.0f64;
    let mut d2 = 0.0f64;
    for &x in grid.points() {
        d1 = d1.max((wpp.value(x)? - w_up.value(x)?).norm());
        d2 = d2.max((wppp.value(x)? - wp_down.value(x)?).norm());
    }
    Ok((d1, d2))
}
