//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails.

use std::io::Write;
use std::panic::AssertUnwindSafe;

use ptsusy_core::numerics::eigen::relative_residual;
use ptsusy_core::numerics::{
    eig_with, solve_job, ComplexMatrix, EigenMethod, EigenOptions, FdAccuracy, NumericJob, StencilOrder,
};
use ptsusy_core::operators::{standard_packets, Jet};
use ptsusy_core::potentials::verify_pt_symmetry;
use ptsusy_core::psusy::{self, build_triplet, limiting_pattern, triplet_spectrum};
use ptsusy_core::ssusy::{self, quasi_hamiltonian_residual, ssusy_from_family, superpotentials_from_p};
use ptsusy_core::susy::{self, annihilation_residual};
use ptsusy_core::{Choice, Family, Grid, PotentialParams, QuasiParity, SuperpotentialSpec, Variant, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn osc(alpha: f64, delta: f64) -> PotentialParams {
    PotentialParams::oscillator(alpha, delta)
}

fn pt() -> PotentialParams {
    PotentialParams::poschl_teller(1.2, 3.9, 0.3)
}

fn scarf() -> PotentialParams {
    PotentialParams::scarf(2.3, 1.4)
}

/// One parameter set per family for which both PSUSY choices exist.
fn psusy_cases() -> Vec<(PotentialParams, Choice)> {
    [osc(2.5, 1.0), pt(), scarf()].into_iter().flat_map(|p| Choice::BOTH.map(|c| (p, c))).collect()
}

fn susy_specs() -> Vec<SuperpotentialSpec> {
    [osc(0.75, 1.0), pt(), scarf()]
        .into_iter()
        .flat_map(|p| Variant::for_family(p.family()).iter().map(move |&v| SuperpotentialSpec::new(v, p).unwrap()))
        .collect()
}

fn packets(grid: &Grid) -> Vec<Jet> {
    standard_packets().iter().map(|p| p.jet(grid)).collect()
}

fn sorted_matches(job: NumericJob) -> ptsusy_core::numerics::MatchReport {
    let mut report = solve_job(&job).unwrap().report;
    report.matched.sort_by(|a, b| a.analytic.total_cmp(&b.analytic));
    report
}

fn linear_limit() -> Outcome {
    let job = NumericJob::new(osc(0.5, 0.5)).with_grid(10.5, 1500, StencilOrder::Fourth);
    let report = sorted_matches(job);
    if report.matched.len() < 10 {
        return Outcome::new(false, format!("only {} levels matched", report.matched.len()));
    }
    let first = &report.matched[..10];
    let ladder = first.iter().enumerate().all(|(k, m)| m.analytic == 2.0 * k as f64 + 1.0);
    let de = first.iter().map(|m| m.delta).fold(0.0, f64::max);
    let im = first.iter().map(|m| m.numeric.im.abs()).fold(0.0, f64::max);
    Outcome::new(
        ladder && de < 1e-4 && im < 1e-6,
        format!("analytic 1,3,..,19: {ladder}; max|dE| {de:.2e} (< 1e-4); max|Im E| {im:.2e} (< 1e-6)"),
    )
}

fn split_towers() -> Outcome {
    let report = sorted_matches(NumericJob::new(osc(0.75, 1.0)));
    if report.matched.len() < 8 {
        return Outcome::new(false, format!("only {} levels matched", report.matched.len()));
    }
    let first = &report.matched[..8];
    let mut want: Vec<f64> = (0..4).flat_map(|n| [4.0 * n as f64 + 0.5, 4.0 * n as f64 + 3.5]).collect();
    want.sort_by(f64::total_cmp);
    let energies = first.iter().zip(&want).all(|(m, w)| (m.analytic - w).abs() < 1e-12);
    let de = first.iter().map(|m| m.delta).fold(0.0, f64::max);
    // the nearer tower to the numerical eigenvalue must carry the label
    let off = |e: f64, base: f64| {
        let r = (e - base).rem_euclid(4.0);
        r.min(4.0 - r)
    };
    let parity = first.iter().all(|m| {
        let even = off(m.numeric.re, 0.5) < off(m.numeric.re, 3.5);
        (m.level.q == QuasiParity::Even) == even
    });
    Outcome::new(
        energies && de < 1e-4 && parity,
        format!("towers 4n+0.5, 4n+3.5: {energies}; max|dE| {de:.2e} (< 1e-4); quasi-parity consistent: {parity}"),
    )
}

fn bound_towers(params: PotentialParams, counts: (usize, usize), want: &[f64]) -> Outcome {
    let ce = params.n_max(QuasiParity::Even).count();
    let co = params.n_max(QuasiParity::Odd).count();
    let counted = ce == Some(counts.0) && co == Some(counts.1);
    let report = sorted_matches(NumericJob::new(params));
    let mut got: Vec<f64> = report.matched.iter().map(|m| m.analytic).collect();
    let mut want = want.to_vec();
    got.sort_by(f64::total_cmp);
    want.sort_by(f64::total_cmp);
    let energies = got.len() == want.len() && got.iter().zip(&want).all(|(a, b)| (a - b).abs() < 1e-12);
    let all = report.unmatched.is_empty() && report.matched.len() == want.len();
    let de = report.max_delta;
    let im = report.max_imag;
    Outcome::new(
        counted && energies && all && de < 5e-4 && im < 1e-5,
        format!(
            "counts {ce:?}+{co:?}; matched {}/{}; max|dE| {de:.2e} (< 5e-4); max|Im E| {im:.2e} (< 1e-5)",
            report.matched.len(),
            want.len()
        ),
    )
}

fn pt_towers() -> Outcome {
    // -(B - 1/2 - n)^2 for n < B - 1/2, -(A - n)^2 for n < A
    bound_towers(pt(), (4, 2), &[-11.56, -5.76, -1.96, -0.16, -1.44, -0.04])
}

fn scarf_towers() -> Outcome {
    bound_towers(scarf(), (3, 1), &[-5.29, -1.69, -0.09, -0.81])
}

fn pairs_match(got: &[psusy::SpectrumEntry], want: &[(f64, usize)], tol: f64) -> bool {
    got.len() == want.len() && got.iter().zip(want).all(|(g, w)| (g.energy - w.0).abs() <= tol && g.degeneracy == w.1)
}

fn psusy_pattern() -> Outcome {
    let first = [(-5.0, 1), (-1.0, 3), (3.0, 3), (5.0, 2), (7.0, 3), (9.0, 3)];
    let second = [(-5.0, 2), (-1.0, 3), (3.0, 3), (5.0, 1), (7.0, 3), (9.0, 3)];
    let g1 = triplet_spectrum(&build_triplet(&osc(2.5, 1.0), Choice::First).unwrap(), 6);
    let g2 = triplet_spectrum(&build_triplet(&osc(2.5, 1.0), Choice::Second).unwrap(), 6);
    let ok1 = pairs_match(&g1, &first, 1e-12);
    let ok2 = pairs_match(&g2, &second, 1e-12);
    let show = |g: &[psusy::SpectrumEntry]| {
        g.iter().map(|e| format!("({}, {})", e.energy, e.degeneracy)).collect::<Vec<_>>().join(" ")
    };
    Outcome::new(ok1 && ok2, format!("first {}; second {}", show(&g1), show(&g2)))
}

fn integer_limit() -> Outcome {
    let energies = [-6.0, -2.0, 2.0, 6.0, 10.0, 14.0];
    let mut ok = true;
    let mut detail = Vec::new();
    for (choice, degs) in [(Choice::First, [1, 3, 3, 3, 3, 3]), (Choice::Second, [2, 3, 3, 3, 3, 3])] {
        let got = limiting_pattern(Family::Oscillator, 3, 1.0, choice, 6).unwrap();
        let e: Vec<f64> = got.iter().map(|x| x.energy).collect();
        let d = psusy::degeneracies(&got);
        ok &= e == energies && d == degs;
        detail.push(format!("{choice}: E {e:?} d {d:?}"));
    }
    Outcome::new(ok, detail.join("; "))
}

fn constraint_identity() -> Outcome {
    let grid = Grid::new(8.0, 401).unwrap();
    let worst = psusy_cases()
        .iter()
        .map(|(p, c)| psusy::constraint_residual(&build_triplet(p, *c).unwrap(), &grid).unwrap())
        .fold(0.0, f64::max);
    Outcome::new(worst < 1e-10, format!("6 cases, max residual {worst:.2e} (< 1e-10)"))
}

fn annihilation() -> Outcome {
    let grid = Grid::new(8.0, 401).unwrap();
    let specs = susy_specs();
    let worst =
        specs.iter().map(|s| annihilation_residual(s, s.annihilated_level(), &grid).unwrap()).fold(0.0, f64::max);
    Outcome::new(
        specs.len() == 8 && worst < 1e-10,
        format!("{} (family, variant) pairs, max residual {worst:.2e} (< 1e-10)", specs.len()),
    )
}

fn ssusy_psusy_consistency() -> Outcome {
    let grid = Grid::new(8.0, 401).unwrap();
    let mut worst = 0.0f64;
    let mut c_exact = true;
    for (p, choice) in psusy_cases() {
        let t = build_triplet(&p, choice).unwrap();
        let d = ssusy_from_family(&p, choice).unwrap();
        c_exact &= d.c == t.c1 - t.c2;
        for &x in grid.points() {
            let (w1, w2) = superpotentials_from_p(&d, x).unwrap();
            worst = worst.max((w1 - t.w1.value(x).unwrap()).norm());
            worst = worst.max((w2 - t.w2.value(x).unwrap()).norm());
        }
    }
    Outcome::new(
        worst < 1e-12 && c_exact,
        format!("max|W - W_psusy| {worst:.2e} (< 1e-12); c = c1 - c2 exactly: {c_exact}"),
    )
}

fn quasi_hamiltonian() -> Outcome {
    let grid = Grid::with_spacing(8.0, 0.001).unwrap();
    let fs = packets(&grid);
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (p, choice) in psusy_cases() {
        let d = ssusy_from_family(&p, choice).unwrap();
        let r = quasi_hamiltonian_residual(&d, &fs, &grid, FdAccuracy::Fourth).unwrap();
        worst = worst.max(r);
        parts.push(format!("{} {choice} {r:.1e}", p.family()));
    }
    Outcome::new(worst < 1e-6, format!("h = 0.001: {} (< 1e-6)", parts.join(", ")))
}

fn ratios(r: &[f64; 3]) -> [f64; 2] {
    [r[0] / r[1], r[1] / r[2]]
}

fn intertwining_order() -> Outcome {
    let hs = [0.02, 0.01, 0.005];
    let grids: Vec<Grid> = hs.iter().map(|&h| Grid::with_spacing(8.0, h).unwrap()).collect();
    let jets: Vec<Vec<Jet>> = grids.iter().map(packets).collect();
    let worst_over = |f: &dyn Fn(&Jet, &Grid) -> f64| -> [f64; 3] {
        let mut out = [0.0; 3];
        for (k, g) in grids.iter().enumerate() {
            out[k] = jets[k].iter().map(|j| f(j, g)).fold(0.0, f64::max);
        }
        out
    };
    let mut all = Vec::new();
    for spec in susy_specs() {
        let r = worst_over(&|j, g| susy::intertwining_residual(&spec, j, g, FdAccuracy::Second).unwrap());
        all.push((format!("{} {}", spec.family(), spec.variant()), ratios(&r)));
    }
    for (p, choice) in psusy_cases() {
        let d = ssusy_from_family(&p, choice).unwrap();
        let r = worst_over(&|j, g| ssusy::intertwining_residual(&d, j, g, FdAccuracy::Second).unwrap());
        all.push((format!("ssusy {} {choice}", p.family()), ratios(&r)));
    }
    let bad: Vec<String> = all
        .iter()
        .filter(|(_, r)| !r.iter().all(|x| (3.5..=4.5).contains(x)))
        .map(|(n, r)| format!("{n} {:.2}/{:.2}", r[0], r[1]))
        .collect();
    let lo = all.iter().flat_map(|(_, r)| r.iter().copied()).fold(f64::INFINITY, f64::min);
    let hi = all.iter().flat_map(|(_, r)| r.iter().copied()).fold(0.0, f64::max);
    Outcome::new(
        bad.is_empty(),
        format!(
            "{} operators, ratios in [{lo:.2}, {hi:.2}] (3.5-4.5){}",
            all.len(),
            if bad.is_empty() { String::new() } else { format!("; out of range: {}", bad.join(", ")) }
        ),
    )
}

fn pt_symmetry() -> Outcome {
    let grid = Grid::new(8.0, 401).unwrap();
    let cases = [osc(0.75, 1.0), osc(2.5, 0.3), pt(), PotentialParams::poschl_teller(0.4, 2.2, -0.7), scarf()];
    let worst = cases.iter().map(|p| verify_pt_symmetry(p, grid.points()).unwrap()).fold(0.0, f64::max);
    Outcome::new(worst < 1e-12, format!("{} parameter sets, max|V*(-x) - V(x)| {worst:.2e} (< 1e-12)", cases.len()))
}

fn random_c(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn random_tridiagonal(n: usize, symmetric: bool, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let diag: Vec<C64> = (0..n).map(|_| random_c(rng)).collect();
    let sub: Vec<C64> = (1..n).map(|_| random_c(rng)).collect();
    let sup: Vec<C64> = if symmetric { sub.clone() } else { (1..n).map(|_| random_c(rng)).collect() };
    ComplexMatrix::tridiagonal(&sub, &diag, &sup)
}

/// Characteristic polynomial coefficients, lowest degree first, monic.
fn char_poly(m: &ComplexMatrix) -> Vec<C64> {
    let n = m.dim();
    let zero = C64::new(0.0, 0.0);
    let mul = |a: &[Vec<C64>], b: &[Vec<C64>]| -> Vec<Vec<C64>> {
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
    };
    let a: Vec<Vec<C64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut c = vec![zero; n + 1];
    c[n] = C64::new(1.0, 0.0);
    let mut mk = vec![vec![zero; n]; n];
    for k in 1..=n {
        let mut next = mul(&a, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += c[n - k + 1];
        }
        mk = next;
        let am = mul(&a, &mk);
        let tr: C64 = (0..n).map(|i| am[i][i]).sum();
        c[n - k] = -tr / k as f64;
    }
    c
}

fn horner(c: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Weierstrass iteration followed by a Newton polish.
fn poly_roots(c: &[C64]) -> Vec<C64> {
    let n = c.len() - 1;
    let radius = 1.0 + c[..n].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let seed = C64::new(0.4, 0.9);
    let mut z: Vec<C64> = (0..n).map(|k| seed.powu(k as u32) * radius / 2.0).collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let mut den = C64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    den *= z[i] - z[j];
                }
            }
            let step = horner(c, z[i]).0 / den;
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 {
            break;
        }
    }
    for zi in &mut z {
        for _ in 0..3 {
            let (p, dp) = horner(c, *zi);
            if dp.norm() > 0.0 {
                *zi -= p / dp;
            }
        }
    }
    z
}

fn eigensolver_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst_res = 0.0f64;
    let mut worst_oracle = 0.0f64;
    let mut count = 0;
    let mut unconverged = 0;
    for n in [1usize, 2, 3, 4, 5, 6, 10, 25, 50, 100, 150, 200] {
        for trial in 0..4 {
            let symmetric = trial % 2 == 1;
            let m = random_tridiagonal(n, symmetric, &mut rng);
            let method = if trial == 3 { EigenMethod::General } else { EigenMethod::Auto };
            let mut eig = eig_with(&m, &EigenOptions { method, ..EigenOptions::default() });
            if !eig.all_converged() {
                unconverged += 1;
            }
            eig.compute_all_eigenvectors(&m);
            let norm = m.frobenius_norm();
            for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
                let v = eig.eigenvector(i).unwrap();
                worst_res = worst_res.max(relative_residual(&m, lambda, v, norm));
            }
            if n <= 6 {
                let mut roots = poly_roots(&char_poly(&m));
                for &lambda in &eig.eigenvalues {
                    let (k, d) = roots
                        .iter()
                        .enumerate()
                        .map(|(k, r)| (k, (r - lambda).norm()))
                        .min_by(|a, b| a.1.total_cmp(&b.1))
                        .unwrap();
                    roots.remove(k);
                    worst_oracle = worst_oracle.max(d / lambda.norm().max(1.0));
                }
            }
            count += 1;
        }
    }
    Outcome::new(
        worst_res < 1e-10 && worst_oracle < 1e-8 && unconverged == 0,
        format!(
            "{count} matrices up to 200x200: max residual {worst_res:.2e} (< 1e-10); char-poly oracle {worst_oracle:.2e} (< 1e-8); unconverged {unconverged}"
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 13] = [
        ("linear-oscillator limit", linear_limit),
        ("split oscillator towers", split_towers),
        ("Poschl-Teller bound towers", pt_towers),
        ("Scarf II bound towers", scarf_towers),
        ("PSUSY degeneracy pattern", psusy_pattern),
        ("integer-limit pattern", integer_limit),
        ("PSUSY constraint identity", constraint_identity),
        ("annihilation of designated states", annihilation),
        ("SSUSY / PSUSY consistency", ssusy_psusy_consistency),
        ("quasi-Hamiltonian identity", quasi_hamiltonian),
        ("intertwining convergence order", intertwining_order),
        ("PT symmetry of potentials", pt_symmetry),
        ("eigensolver property suite", eigensolver_suite),
    ];
    let outcomes: Vec<Outcome> = std::thread::scope(|s| {
        let handles: Vec<_> =
            criteria.iter().map(|&(_, f)| s.spawn(move || std::panic::catch_unwind(AssertUnwindSafe(f)))).collect();
        handles
            .into_iter()
            .map(|h| match h.join().unwrap() {
                Ok(o) => o,
                Err(e) => {
                    let msg = e
                        .downcast_ref::<String>()
                        .cloned()
                        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                        .unwrap_or_default();
                    Outcome::new(false, format!("panicked: {msg}"))
                }
            })
            .collect()
    });
    // straight to the handle so the summary shows without --nocapture
    let mut out = std::io::stdout().lock();
    let mut failed = Vec::new();
    for (i, ((name, _), o)) in criteria.iter().zip(&outcomes).enumerate() {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        writeln!(out, "criterion {:>2} {tag}  {name}: {}", i + 1, o.detail).unwrap();
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
