//! Order-two parasupersymmetry: triplets of component Hamiltonians built from
//! two superpotentials, their merged spectrum and the 3×3 charge algebra.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::fd::FdAccuracy;
use crate::numerics::{max_abs, Grid, NumericsError};
use crate::operators::{first_order, Derivative, Jet};
use crate::potentials::{Family, LevelIndex, ParamError, PotentialError, PotentialParams, QuasiParity, ValidationMode};
use crate::special::C64;
use crate::susy::{SuperpotentialSpec, SusyError, Variant};

/// Energies closer than this are one level of the merged spectrum.
pub const MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Choice {
    First,
    Second,
}

impl Choice {
    pub const BOTH: [Choice; 2] = [Choice::First, Choice::Second];

    pub fn name(self) -> &'static str {
        match self {
            Choice::First => "first",
            Choice::Second => "second",
        }
    }
}

impl fmt::Display for Choice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Choice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "first" | "1" => Ok(Choice::First),
            "second" | "2" => Ok(Choice::Second),
            other => Err(format!("unknown choice {other:?} (expected first or second)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Component {
    H1,
    H2,
    H3,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::H1, Component::H2, Component::H3];
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Component::H1 => "H1",
            Component::H2 => "H2",
            Component::H3 => "H3",
        })
    }
}

impl std::str::FromStr for Component {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "H1" | "h1" => Ok(Component::H1),
            "H2" | "h2" => Ok(Component::H2),
            "H3" | "h3" => Ok(Component::H3),
            other => Err(format!("unknown component {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PsusyError {
    #[error("{component} parameters leave the family domain: {source}")]
    DerivedDomain { component: Component, source: ParamError },
    #[error("limiting patterns are defined for the oscillator only (got {0})")]
    LimitingFamily(Family),
    #[error("{choice} choice needs N >= {min} (got {n})")]
    LimitingIndex { choice: Choice, n: u32, min: u32 },
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Susy(#[from] SusyError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// `𝓔 = ½[A² + (B − ½)²]`, the constant added to every Pöschl-Teller and
/// Scarf component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalligraphicShift {
    pub script_e: f64,
}

impl CalligraphicShift {
    pub fn for_params(params: &PotentialParams) -> Option<Self> {
        let (a, b) = match *params {
            PotentialParams::Oscillator(_) => return None,
            PotentialParams::PoschlTeller(p) => (p.a, p.b),
            PotentialParams::Scarf(p) => (p.a, p.b),
        };
        Some(Self { script_e: 0.5 * (a * a + (b - 0.5).powi(2)) })
    }
}

/// One component as a shifted family Hamiltonian `H^{params} + shift`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentHamiltonian {
    pub component: Component,
    pub params: PotentialParams,
    pub shift: f64,
}

impl ComponentHamiltonian {
    pub fn energy(&self, level: LevelIndex) -> Result<f64, PotentialError> {
        Ok(self.params.energy(level)? + self.shift)
    }

    pub fn potential_value(&self, x: f64) -> Result<C64, PotentialError> {
        Ok(self.params.potential_value(x)? + self.shift)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsusyTriplet {
    pub w1: SuperpotentialSpec,
    pub w2: SuperpotentialSpec,
    pub c1: f64,
    pub c2: f64,
    pub choice: Choice,
}

pub fn build_triplet(params: &PotentialParams, choice: Choice) -> Result<PsusyTriplet, PsusyError> {
    build_triplet_with(params, choice, ValidationMode::Strict)
}

pub fn build_triplet_with(
    params: &PotentialParams,
    choice: Choice,
    mode: ValidationMode,
) -> Result<PsusyTriplet, PsusyError> {
    params.validate(mode)?;
    use Variant::{WPrime, W};
    let (v1, p1, v2, p2, c1) = match (*params, choice) {
        (PotentialParams::Oscillator(p), Choice::First) => {
            let down = PotentialParams::oscillator(p.alpha - 1.0, p.delta);
            (W, *params, WPrime, down, -2.0 * p.alpha)
        }
        (PotentialParams::Oscillator(p), Choice::Second) => {
            let up = PotentialParams::oscillator(p.alpha + 1.0, p.delta);
            (WPrime, *params, W, up, 2.0 * p.alpha)
        }
        (PotentialParams::PoschlTeller(p), choice) => {
            let half = 0.5 * (p.a * p.a - (p.b - 0.5).powi(2));
            match choice {
                Choice::First => (W, *params, WPrime, PotentialParams::poschl_teller(p.a, p.b - 1.0, p.gamma), half),
                Choice::Second => (WPrime, *params, W, PotentialParams::poschl_teller(p.a - 1.0, p.b, p.gamma), -half),
            }
        }
        (PotentialParams::Scarf(p), choice) => {
            let half = 0.5 * ((p.b - 0.5).powi(2) - p.a * p.a);
            match choice {
                Choice::First => (W, *params, WPrime, PotentialParams::scarf(p.a - 1.0, p.b), half),
                Choice::Second => (WPrime, *params, W, PotentialParams::scarf(p.a, p.b - 1.0), -half),
            }
        }
    };
    let triplet = PsusyTriplet {
        w1: SuperpotentialSpec::new(v1, p1)?,
        w2: SuperpotentialSpec::new(v2, p2)?,
        c1,
        c2: -c1,
        choice,
    };
    for comp in triplet.components() {
        check_component_domain(&comp)?;
    }
    Ok(triplet)
}

// shifted records may leave the strict domain (their towers then shrink or
// vanish); only a non-positive oscillator α or a Pöschl-Teller A ≤ −½ is refused
fn check_component_domain(comp: &ComponentHamiltonian) -> Result<(), PsusyError> {
    let err = match comp.params {
        PotentialParams::Oscillator(p) if p.alpha <= 0.0 => Some(ParamError::AlphaNotPositive(p.alpha)),
        PotentialParams::PoschlTeller(p) if p.a + 0.5 <= 0.0 => Some(ParamError::PtLowerBound(p.a)),
        _ => None,
    };
    match err {
        Some(source) => Err(PsusyError::DerivedDomain { component: comp.component, source }),
        None => Ok(()),
    }
}

impl PsusyTriplet {
    pub fn family(&self) -> Family {
        self.w1.family()
    }

    /// The family record the triplet was built from.
    pub fn params(&self) -> &PotentialParams {
        self.w1.params()
    }

    /// `c = c1 − c2`.
    pub fn c(&self) -> f64 {
        self.c1 - self.c2
    }

    /// `H1 = Ā1A1 + c1`, `H2 = A1Ā1 + c1`, `H3 = A2Ā2 + c2`, each identified
    /// with a family Hamiltonian through the partner maps of `W1` and `W2`.
    pub fn component(&self, which: Component) -> ComponentHamiltonian {
        let (spec, side, c) = match which {
            Component::H1 => (&self.w1, self.w1.partner_map().plus, self.c1),
            Component::H2 => (&self.w1, self.w1.partner_map().minus, self.c1),
            Component::H3 => (&self.w2, self.w2.partner_map().minus, self.c2),
        };
        ComponentHamiltonian {
            component: which,
            params: side.params,
            shift: side.offset - spec.factorization_energy() + c,
        }
    }

    pub fn components(&self) -> [ComponentHamiltonian; 3] {
        Component::ALL.map(|c| self.component(c))
    }

    /// Component potentials straight from the superpotentials:
    /// `(W1² − W1' + c1, W1² + W1' + c1, W2² + W2' + c2)`.
    pub fn component_potentials(&self, x: f64) -> Result<[C64; 3], PsusyError> {
        let (w1, d1) = self.w1.value_and_derivative(x)?;
        let (w2, d2) = self.w2.value_and_derivative(x)?;
        Ok([w1 * w1 - d1 + self.c1, w1 * w1 + d1 + self.c1, w2 * w2 + d2 + self.c2])
    }
}

/// `max |W2² − W1² − W1' − W2' − c|` over the grid.
pub fn constraint_residual(triplet: &PsusyTriplet, grid: &Grid) -> Result<f64, PsusyError> {
    let c = triplet.c();
    let mut worst = 0.0f64;
    for &x in grid.points() {
        let (w1, d1) = triplet.w1.value_and_derivative(x)?;
        let (w2, d2) = triplet.w2.value_and_derivative(x)?;
        worst = worst.max((w2 * w2 - w1 * w1 - d1 - d2 - c).norm());
    }
    Ok(worst)
}

pub fn component_energy(triplet: &PsusyTriplet, which: Component, level: LevelIndex) -> Result<f64, PsusyError> {
    Ok(triplet.component(which).energy(level)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub energy: f64,
    pub degeneracy: usize,
    pub members: Vec<(Component, LevelIndex)>,
}

/// Merged spectrum of `H1 ⊕ H2 ⊕ H3`, lowest `max_levels` entries.
///
/// Within one component, levels of the two towers that coincide (integer
/// ties) are a single state and counted once.
pub fn triplet_spectrum(triplet: &PsusyTriplet, max_levels: usize) -> Vec<SpectrumEntry> {
    // each tower rises, so `max_levels` levels per tower cover the lowest
    // `max_levels` distinct merged energies
    let mut all: Vec<(f64, Component, LevelIndex)> = Vec::new();
    for comp in triplet.components() {
        let mut own: Vec<(f64, LevelIndex)> = Vec::new();
        for q in QuasiParity::BOTH {
            for (level, e) in comp.params.tower(q, max_levels) {
                let e = e + comp.shift;
                if !own.iter().any(|(f, _)| (f - e).abs() <= MERGE_TOL) {
                    own.push((e, level));
                }
            }
        }
        all.extend(own.into_iter().map(|(e, l)| (e, comp.component, l)));
    }
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut out: Vec<SpectrumEntry> = Vec::new();
    for (e, comp, level) in all {
        match out.last_mut() {
            Some(last) if (e - last.energy).abs() <= MERGE_TOL => {
                last.members.push((comp, level));
                last.degeneracy += 1;
            }
            _ => out.push(SpectrumEntry { energy: e, degeneracy: 1, members: vec![(comp, level)] }),
        }
    }
    out.truncate(max_levels);
    out
}

/// Degeneracy sequence of a merged spectrum.
pub fn degeneracies(entries: &[SpectrumEntry]) -> Vec<usize> {
    entries.iter().map(|e| e.degeneracy).collect()
}

/// Merged oscillator spectrum at integer `α = N` (single-series towers).
/// The first choice needs `N >= 2`, the second `N >= 1`.
pub fn limiting_pattern(
    family: Family,
    n: u32,
    delta: f64,
    choice: Choice,
    max_levels: usize,
) -> Result<Vec<SpectrumEntry>, PsusyError> {
    if family != Family::Oscillator {
        return Err(PsusyError::LimitingFamily(family));
    }
    let min = match choice {
        Choice::First => 2,
        Choice::Second => 1,
    };
    if n < min {
        return Err(PsusyError::LimitingIndex { choice, n, min });
    }
    let params = PotentialParams::oscillator(n as f64, delta);
    let triplet = build_triplet_with(&params, choice, ValidationMode::Limiting)?;
    Ok(triplet_spectrum(&triplet, max_levels))
}

/// Residuals of the two charge identities on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgebraResidual {
    /// `max |Q³F|`.
    pub nilpotency: f64,
    /// `max |(Q²Q̄ + QQ̄Q + Q̄Q² − 2Q·H_ps)F|`.
    pub trilinear: f64,
}

impl AlgebraResidual {
    pub fn max(&self) -> f64 {
        self.nilpotency.max(self.trilinear)
    }
}

type Block = [Vec<C64>; 3];

/// `Q` with `(Q)_{i,j} = (d/dx + W_j) δ_{i,j+1}`; finite-difference derivatives.
fn apply_q(w: &[Vec<C64>; 2], f: &Block, h: f64, acc: FdAccuracy) -> Result<Block, NumericsError> {
    let zero = vec![C64::new(0.0, 0.0); f[0].len()];
    let a1 = first_order(1.0, &w[0], &f[0], Derivative::FiniteDifference(acc), h)?;
    let a2 = first_order(1.0, &w[1], &f[1], Derivative::FiniteDifference(acc), h)?;
    Ok([zero, a1, a2])
}

/// Checks `Q³ = 0` and `Q²Q̄ + QQ̄Q + Q̄Q² = 2Q·H_ps` on `F = (f1, f2, f3)`,
/// with `H_ps = diag(Ā1A1 + c1, A1Ā1 + c1, A2Ā2 + c2)`.
///
/// Inner operator layers use the jets' exact derivatives; only the outermost
/// first-order layer is a finite difference of accuracy `acc`.
pub fn psusy_algebra_residual(
    triplet: &PsusyTriplet,
    f: &[Jet; 3],
    grid: &Grid,
    acc: FdAccuracy,
) -> Result<AlgebraResidual, PsusyError> {
    for j in f {
        j.check(grid)?;
    }
    let n = grid.n();
    let h = grid.h();
    let (w1, dw1) = triplet.w1.sample(grid)?;
    let (w2, dw2) = triplet.w2.sample(grid)?;
    let fd = Derivative::FiniteDifference(acc);

    let block = [f[0].f.clone(), f[1].f.clone(), f[2].f.clone()];
    let w = [w1.clone(), w2.clone()];
    let q1 = apply_q(&w, &block, h, acc)?;
    let q2 = apply_q(&w, &q1, h, acc)?;
    let q3 = apply_q(&w, &q2, h, acc)?;
    let nilpotency = q3.iter().map(|v| max_abs(v)).fold(0.0, f64::max);

    // row 2: A1Ā1(A1f1) + Ā2A2(A1f1) − 2A1(H1f1)
    let (f1, f2) = (&f[0], &f[1]);
    let g: Vec<C64> = (0..n).map(|i| f1.d1[i] + w1[i] * f1.f[i]).collect();
    let dg: Vec<C64> = (0..n).map(|i| f1.d2[i] + dw1[i] * f1.f[i] + w1[i] * f1.d1[i]).collect();
    let abar1_g: Vec<C64> = (0..n).map(|i| -dg[i] + w1[i] * g[i]).collect();
    let a2_g: Vec<C64> = (0..n).map(|i| dg[i] + w2[i] * g[i]).collect();
    let h1_f1: Vec<C64> = (0..n).map(|i| -f1.d2[i] + (w1[i] * w1[i] - dw1[i] + triplet.c1) * f1.f[i]).collect();
    let t1 = first_order(1.0, &w1, &abar1_g, fd, h)?;
    let t2 = first_order(-1.0, &w2, &a2_g, fd, h)?;
    let t3 = first_order(1.0, &w1, &h1_f1, fd, h)?;
    let row2: Vec<C64> = (0..n).map(|i| t1[i] + t2[i] - 2.0 * t3[i]).collect();

    // row 3: A2[(A1Ā1 + Ā2A2 − 2H2) f2]
    let inner: Vec<C64> = (0..n)
        .map(|i| {
            let a1abar1 = -f2.d2[i] + (w1[i] * w1[i] + dw1[i]) * f2.f[i];
            let abar2a2 = -f2.d2[i] + (w2[i] * w2[i] - dw2[i]) * f2.f[i];
            let h2 = -f2.d2[i] + (w1[i] * w1[i] + dw1[i] + triplet.c1) * f2.f[i];
            a1abar1 + abar2a2 - 2.0 * h2
        })
        .collect();
    let row3 = first_order(1.0, &w2, &inner, fd, h)?;

    Ok(AlgebraResidual { nilpotency, trilinear: max_abs(&row2).max(max_abs(&row3)) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::standard_packets;

    fn osc(a: f64) -> PotentialParams {
        PotentialParams::oscillator(a, 1.0)
    }
    fn pt() -> PotentialParams {
        PotentialParams::poschl_teller(1.2, 3.9, 0.3)
    }
    fn scarf() -> PotentialParams {
        PotentialParams::scarf(2.3, 1.4)
    }

    fn entries(t: &PsusyTriplet, k: usize) -> Vec<(f64, usize)> {
        triplet_spectrum(t, k).iter().map(|e| (e.energy, e.degeneracy)).collect()
    }

    fn assert_pairs(got: &[(f64, usize)], want: &[(f64, usize)]) {
        assert_eq!(got.len(), want.len(), "{got:?} vs {want:?}");
        for (g, w) in got.iter().zip(want) {
            assert!((g.0 - w.0).abs() < 1e-12 && g.1 == w.1, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn c1_examples() {
        assert_eq!(build_triplet(&osc(2.5), Choice::First).unwrap().c1, -5.0);
        assert_eq!(build_triplet(&osc(2.5), Choice::Second).unwrap().c1, 5.0);
        assert!((build_triplet(&pt(), Choice::First).unwrap().c1 + 5.06).abs() < 1e-12);
        assert!((build_triplet(&scarf(), Choice::First).unwrap().c1 + 2.24).abs() < 1e-12);
        for p in [osc(2.5), pt(), scarf()] {
            for ch in Choice::BOTH {
                let t = build_triplet(&p, ch).unwrap();
                assert_eq!(t.c1 + t.c2, 0.0);
            }
        }
    }

    #[test]
    fn oscillator_first_needs_alpha_above_one() {
        match build_triplet(&osc(0.75), Choice::First) {
            Err(PsusyError::DerivedDomain { component: Component::H2, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(build_triplet(&osc(0.75), Choice::Second).is_ok());
    }

    #[test]
    fn constraint_holds_everywhere() {
        let g = Grid::new(8.0, 401).unwrap();
        for p in [osc(2.5), osc(1.3), pt(), scarf()] {
            for ch in Choice::BOTH {
                let t = build_triplet(&p, ch).unwrap();
                let r = constraint_residual(&t, &g).unwrap();
                assert!(r < 1e-10, "{p:?} {ch}: {r}");
            }
        }
    }

    #[test]
    fn components_match_superpotential_forms() {
        // H2 is reached both as A1Ā1 + c1 and as Ā2A2 + c2
        for p in [osc(2.5), pt(), scarf()] {
            for ch in Choice::BOTH {
                let t = build_triplet(&p, ch).unwrap();
                let alt = t.w2.partner_map().plus;
                let alt_shift = alt.offset - t.w2.factorization_energy() + t.c2;
                let h2 = t.component(Component::H2);
                for &x in &[-1.7, 0.0, 0.4, 2.2] {
                    let v = t.component_potentials(x).unwrap();
                    for (k, comp) in t.components().iter().enumerate() {
                        let d = (v[k] - comp.potential_value(x).unwrap()).norm();
                        assert!(d < 1e-10, "{p:?} {ch} {}: {d}", comp.component);
                    }
                    let via_w2 = alt.params.potential_value(x).unwrap() + alt_shift;
                    assert!((via_w2 - h2.potential_value(x).unwrap()).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn component_records() {
        let t = build_triplet(&osc(2.5), Choice::First).unwrap();
        let [h1, h2, h3] = t.components();
        assert_eq!((h1.params, h1.shift), (osc(2.5), -2.0));
        assert_eq!((h2.params, h2.shift), (osc(1.5), 0.0));
        assert_eq!((h3.params, h3.shift), (osc(2.5), 2.0));
        let e = CalligraphicShift::for_params(&scarf()).unwrap().script_e;
        assert!((e - 3.05).abs() < 1e-12);
        for p in [pt(), scarf()] {
            let e = CalligraphicShift::for_params(&p).unwrap().script_e;
            for ch in Choice::BOTH {
                for comp in build_triplet(&p, ch).unwrap().components() {
                    assert!((comp.shift - e).abs() < 1e-12, "{p:?} {ch} {}", comp.component);
                }
            }
        }
        assert!(CalligraphicShift::for_params(&osc(1.5)).is_none());
    }

    #[test]
    fn component_energy_examples() {
        let t = build_triplet(&osc(2.5), Choice::First).unwrap();
        assert_eq!(component_energy(&t, Component::H1, LevelIndex::even(0)).unwrap(), -5.0);
        assert_eq!(component_energy(&t, Component::H3, LevelIndex::even(0)).unwrap(), -1.0);
        let t = build_triplet(&scarf(), Choice::First).unwrap();
        let e = component_energy(&t, Component::H1, LevelIndex::even(0)).unwrap();
        assert!((e + 2.24).abs() < 1e-12);
        let t = build_triplet(&pt(), Choice::First).unwrap();
        assert!(matches!(
            component_energy(&t, Component::H3, LevelIndex::odd(1)),
            Err(PsusyError::Potential(PotentialError::LevelOutOfRange { .. }))
        ));
    }

    // closed-form oscillator pattern for N − 1 < α < N, first choice
    fn oscillator_pattern(alpha: f64, count: usize) -> Vec<(f64, usize)> {
        let n = alpha.ceil() as usize;
        let mut out = vec![(-2.0 * alpha, 1)];
        for k in 1..n {
            out.push((-2.0 * alpha + 4.0 * k as f64, 3));
        }
        out.push((2.0 * alpha, 2));
        let mut m = 0;
        while out.len() < count {
            out.push((-2.0 * alpha + 4.0 * (n + m) as f64, 3));
            out.push((2.0 * alpha + 4.0 * (m + 1) as f64, 3));
            m += 1;
        }
        out.truncate(count);
        out
    }

    #[test]
    fn oscillator_merge_matches_closed_form() {
        for alpha in [1.3f64, 2.5, 3.7] {
            let n = alpha.ceil() as usize;
            let k = 2 * n + 4;
            let t = build_triplet(&osc(alpha), Choice::First).unwrap();
            assert_pairs(&entries(&t, k), &oscillator_pattern(alpha, k));
            // second choice: same energies, d0 and dN swapped
            let mut want = oscillator_pattern(alpha, k);
            want[0].1 = 2;
            want[n].1 = 1;
            let t = build_triplet(&osc(alpha), Choice::Second).unwrap();
            assert_pairs(&entries(&t, k), &want);
        }
    }

    #[test]
    fn oscillator_example_sequence() {
        let t = build_triplet(&osc(2.5), Choice::First).unwrap();
        let got = entries(&t, 6);
        assert_pairs(&got, &[(-5.0, 1), (-1.0, 3), (3.0, 3), (5.0, 2), (7.0, 3), (9.0, 3)]);
    }

    #[test]
    fn pt_merged_spectrum() {
        let t = build_triplet(&pt(), Choice::First).unwrap();
        let e0 = t.c1;
        let got = entries(&t, 100);
        let want = [
            (e0, 1),
            (e0 + 2.0 * 3.9 - 2.0, 3),
            (e0 + 2.0 * (2.0 * 3.9 - 3.0), 3),
            (e0 - 1.44 + 3.4 * 3.4, 2),
            (e0 + 3.0 * (2.0 * 3.9 - 4.0), 3),
            (e0 - 0.04 + 3.4 * 3.4, 3),
        ];
        assert_pairs(&got, &want);
        let t2 = build_triplet(&pt(), Choice::Second).unwrap();
        let mut want2 = want;
        want2[0].1 = 2;
        want2[3].1 = 1;
        assert_pairs(&entries(&t2, 100), &want2);
    }

    #[test]
    fn scarf_merged_spectrum() {
        // A − N < B − ½ < A − N + 1 with A = 2.3, B = 1.4 gives N = 2
        let t = build_triplet(&scarf(), Choice::First).unwrap();
        let e0 = t.c1;
        let (a, b) = (2.3, 1.4);
        let want = [
            (e0, 1),
            (e0 + 2.0 * a - 1.0, 3),
            (e0 + a * a - (b - 0.5) * (b - 0.5), 2),
            (e0 + 2.0 * (2.0 * a - 2.0), 3),
        ];
        assert_pairs(&entries(&t, 100), &want);
        let mut want2 = want;
        want2[0].1 = 2;
        want2[2].1 = 1;
        assert_pairs(&entries(&build_triplet(&scarf(), Choice::Second).unwrap(), 100), &want2);
    }

    #[test]
    fn pt_ground_state_suppression() {
        let t = build_triplet(&pt(), Choice::First).unwrap();
        let [h1, h2, _] = t.components();
        let energies = |c: &ComponentHamiltonian| {
            let mut v: Vec<f64> = c.params.levels(100).iter().map(|l| l.1 + c.shift).collect();
            v.sort_by(f64::total_cmp);
            v
        };
        let mut e1 = energies(&h1);
        let e2 = energies(&h2);
        let ground = e1.remove(0);
        assert!((ground - t.c1).abs() < 1e-12);
        assert_eq!(e1.len(), e2.len());
        for (a, b) in e1.iter().zip(&e2) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn members_are_consistent() {
        for p in [osc(2.5), pt(), scarf()] {
            let t = build_triplet(&p, Choice::First).unwrap();
            for entry in triplet_spectrum(&t, 20) {
                assert_eq!(entry.degeneracy, entry.members.len());
                for (c, l) in &entry.members {
                    let e = component_energy(&t, *c, *l).unwrap();
                    assert!((e - entry.energy).abs() <= MERGE_TOL);
                }
            }
        }
    }

    #[test]
    fn limiting_patterns() {
        let got = limiting_pattern(Family::Oscillator, 3, 1.0, Choice::First, 6).unwrap();
        assert_eq!(degeneracies(&got), vec![1, 3, 3, 3, 3, 3]);
        let e: Vec<f64> = got.iter().map(|x| x.energy).collect();
        assert_eq!(e, vec![-6.0, -2.0, 2.0, 6.0, 10.0, 14.0]);
        assert!(matches!(
            limiting_pattern(Family::Oscillator, 1, 1.0, Choice::First, 5),
            Err(PsusyError::LimitingIndex { min: 2, .. })
        ));
        let got = limiting_pattern(Family::Oscillator, 1, 1.0, Choice::Second, 5).unwrap();
        assert_eq!(degeneracies(&got), vec![2, 3, 3, 3, 3]);
        assert!(limiting_pattern(Family::Scarf, 2, 1.0, Choice::First, 5).is_err());
    }

    fn packets(g: &Grid) -> [Jet; 3] {
        standard_packets().map(|p| p.jet(g))
    }

    #[test]
    fn algebra_residual_converges() {
        for p in [osc(2.5), pt(), scarf()] {
            for ch in Choice::BOTH {
                let t = build_triplet(&p, ch).unwrap();
                let at = |h: f64, acc| {
                    let g = Grid::with_spacing(8.0, h).unwrap();
                    psusy_algebra_residual(&t, &packets(&g), &g, acc).unwrap()
                };
                let (r1, r2) = (at(0.01, FdAccuracy::Second), at(0.005, FdAccuracy::Second));
                assert_eq!(r2.nilpotency, 0.0);
                let ratio = r1.trilinear / r2.trilinear;
                assert!((3.5..4.5).contains(&ratio), "{p:?} {ch}: {ratio}");
                assert!(r2.trilinear < 1e-3, "{p:?} {ch}: {r2:?}");
                let r4 = at(0.005, FdAccuracy::Fourth);
                assert!(r4.trilinear < 1e-5, "{p:?} {ch}: {r4:?}");
            }
        }
    }

    #[test]
    fn algebra_residual_of_zero_is_zero() {
        let g = Grid::new(8.0, 200).unwrap();
        let t = build_triplet(&scarf(), Choice::First).unwrap();
        let z = [Jet::zeros(200), Jet::zeros(200), Jet::zeros(200)];
        let r = psusy_algebra_residual(&t, &z, &g, FdAccuracy::Second).unwrap();
        assert_eq!(r.max(), 0.0);
    }
}
