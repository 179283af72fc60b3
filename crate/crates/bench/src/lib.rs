//! Shared fixtures for the benchmarks.

use ptsusy_core::numerics::ComplexMatrix;
use ptsusy_core::{PotentialParams, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeded random complex tridiagonal matrix; `symmetric` mirrors the
/// off-diagonals so the banded fast path applies.
pub fn random_tridiagonal(n: usize, symmetric: bool, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let diag: Vec<C64> = (0..n).map(|_| c()).collect();
    let sub: Vec<C64> = (1..n).map(|_| c()).collect();
    let sup: Vec<C64> = if symmetric { sub.clone() } else { (1..n).map(|_| c()).collect() };
    ComplexMatrix::tridiagonal(&sub, &diag, &sup)
}

/// The three parameter sets used throughout the test suite.
pub fn acceptance_params() -> [(&'static str, PotentialParams); 3] {
    [
        ("oscillator", PotentialParams::oscillator(0.75, 1.0)),
        ("poschl-teller", PotentialParams::poschl_teller(1.2, 3.9, 0.3)),
        ("scarf", PotentialParams::scarf(2.3, 1.4)),
    ]
}
