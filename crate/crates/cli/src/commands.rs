//! The four subcommands. Each writes its report through one writer and
//! returns 0 when every check passed, 1 otherwise.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::json;

use ptsusy_core::io::{
    format_members, level_diagram, plot_samples, write_level_csv, write_plot_csv, write_spectrum_csv, SpectrumDocument,
    SCHEMA_VERSION,
};
use ptsusy_core::numerics::{
    discretize_potential, eig_with, solve_job, EigenOptions, Grid, MatchReport, NumericJob, NumericOutcome,
};
use ptsusy_core::psusy::{build_triplet_with, limiting_pattern, triplet_spectrum};
use ptsusy_core::ssusy::{ssusy_from_family_with, PShape, SsusyData};
use ptsusy_core::{Choice, Family, LevelIndex, PotentialParams, QuasiParity, SpectrumEntry, ValidationMode};

use crate::checks::{all_passed, tolerance_table, CheckRecord, Status, Suite, VERIFY_HALF_WIDTH, VERIFY_POINTS};
use crate::config::{EigDumpArgs, Format, RunConfig, SpectrumArgs, SsusyMapArgs, VerifyArgs};
use crate::table::{num, sci, Table};

/// Levels per unbounded tower when `--max-levels` is absent.
pub const DEFAULT_MAX_LEVELS: usize = 10;
/// Allowed `|c − (c1 − c2)|` and pointwise W deviation for `ssusy-map`.
pub const SSUSY_MAP_TOL: f64 = 1e-12;

fn open(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn describe(params: &PotentialParams) -> String {
    match params {
        PotentialParams::Oscillator(p) => format!("oscillator alpha={} delta={}", p.alpha, p.delta),
        PotentialParams::PoschlTeller(p) => format!("poschl-teller A={} B={} gamma={}", p.a, p.b, p.gamma),
        PotentialParams::Scarf(p) => format!("scarf A={} B={}", p.a, p.b),
    }
}

fn status_word(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// The merged PSUSY spectrum, through the integer-limit path for oscillator
/// ties in limiting mode.
fn merged(params: &PotentialParams, choice: Choice, mode: ValidationMode, k: usize) -> Result<Vec<SpectrumEntry>> {
    if let PotentialParams::Oscillator(o) = params {
        if mode == ValidationMode::Limiting && params.is_integer_tie() {
            return Ok(limiting_pattern(Family::Oscillator, o.alpha.round() as u32, o.delta, choice, k)?);
        }
    }
    Ok(triplet_spectrum(&build_triplet_with(params, choice, mode)?, k))
}

fn towers(params: &PotentialParams, k: usize) -> Vec<(LevelIndex, f64)> {
    let mut all = params.levels(k);
    all.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    all
}

fn match_table(report: &MatchReport) -> String {
    let mut t = Table::new(["level", "analytic", "Re E", "Im E", "|dE|", "boundary"]);
    let mut rows = report.matched.clone();
    rows.sort_by(|a, b| a.analytic.total_cmp(&b.analytic));
    for m in &rows {
        t.row([
            m.level.to_string(),
            num(m.analytic),
            format!("{:.9}", m.numeric.re),
            sci(m.numeric.im),
            sci(m.delta),
            sci(m.boundary_mass),
        ]);
    }
    let mut s = t.render();
    for (l, e) in &report.unmatched {
        let _ = writeln!(s, "unmatched analytic level {l} (E = {e})");
    }
    let _ = writeln!(
        s,
        "matched {}/{}, max|dE| {}, max|Im E| {}, spurious {}",
        report.matched.len(),
        report.matched.len() + report.unmatched.len(),
        sci(report.max_delta),
        sci(report.max_imag),
        report.spurious
    );
    s
}

pub fn spectrum(args: &SpectrumArgs, rc: &RunConfig) -> Result<i32> {
    let params = rc.params;
    let k = args.max_levels.or(rc.max_levels).unwrap_or(DEFAULT_MAX_LEVELS);
    let choice = args.psusy.or(rc.choice);
    let levels = towers(&params, k);
    let merged_entries = match choice {
        Some(c) => Some(merged(&params, c, rc.mode, k)?),
        None => None,
    };
    let outcome: Option<NumericOutcome> = if args.numeric {
        let mut job = NumericJob::new(params);
        job.grid = rc.grid_settings();
        if let Some(c) = args.cutoff.or(rc.cutoff) {
            job.cutoff = c;
        }
        Some(solve_job(&job)?)
    } else {
        None
    };
    let ok = outcome.as_ref().is_none_or(|o| o.report.all_matched());

    let mut w = open(rc.output.as_deref())?;
    match rc.format {
        Format::Table => {
            writeln!(w, "{}", describe(&params))?;
            writeln!(w, "\nclosed-form levels")?;
            let mut t = Table::new(["level", "energy"]);
            for (l, e) in &levels {
                t.row([l.to_string(), num(*e)]);
            }
            write!(w, "{}", t.render())?;
            for q in QuasiParity::BOTH {
                writeln!(w, "tower {}: n_max {}", q.symbol(), params.n_max(q))?;
            }
            if let (Some(c), Some(entries)) = (choice, &merged_entries) {
                writeln!(w, "\nPSUSY merged spectrum ({c} choice)")?;
                let mut t = Table::new(["index", "energy", "degeneracy", "members"]);
                for (i, e) in entries.iter().enumerate() {
                    t.row([i.to_string(), num(e.energy), e.degeneracy.to_string(), format_members(&e.members)]);
                }
                write!(w, "{}", t.render())?;
            }
            if let Some(o) = &outcome {
                let g = o.job.grid;
                writeln!(
                    w,
                    "\nnumerical check: L = {}, n = {}, order {}, cutoff {}, {:?} path",
                    g.half_width,
                    g.n,
                    g.order.order(),
                    o.job.cutoff,
                    o.path
                )?;
                write!(w, "{}", match_table(&o.report))?;
                writeln!(w, "{}", status_word(ok))?;
            }
        }
        Format::Csv => {
            match &merged_entries {
                Some(entries) => write_spectrum_csv(&mut w, entries)?,
                None => {
                    let mut c = csv_writer(&mut w);
                    c.write_record(["level", "energy"])?;
                    for (l, e) in &levels {
                        c.write_record([l.to_string(), e.to_string()])?;
                    }
                    c.flush()?;
                }
            }
            if let Some(o) = &outcome {
                eprint!("{}", match_table(&o.report));
            }
        }
        Format::Json => {
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "spectrum",
                "params": params,
                "levels": levels.iter().map(|(l, e)| json!({"level": l, "energy": e})).collect::<Vec<_>>(),
                "psusy": merged_entries.as_ref().map(|e| SpectrumDocument::new(Some(params), choice, e.clone())),
                "numeric": outcome,
                "passed": ok,
            });
            serde_json::to_writer_pretty(&mut w, &report)?;
            writeln!(w)?;
        }
    }
    w.flush()?;

    if let Some(dir) = &args.plot_out {
        write_plot_data(dir, rc, &levels, merged_entries.as_deref())?;
    }
    Ok(if ok { 0 } else { 1 })
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::Writer::from_writer(w)
}

fn write_plot_data(
    dir: &Path,
    rc: &RunConfig,
    levels: &[(LevelIndex, f64)],
    merged: Option<&[SpectrumEntry]>,
) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let g = rc.grid_settings();
    let grid = Grid::new(g.half_width, g.n)?;
    let ground = levels.first().map(|l| l.0).unwrap_or(LevelIndex::even(0));
    let samples = plot_samples(&rc.params, ground, &grid)?;
    write_plot_csv(File::create(dir.join("potential.csv"))?, &samples)?;
    let rows = match merged {
        Some(entries) => level_diagram(entries),
        None => levels.iter().enumerate().map(|(i, (_, e))| (i, *e, 1)).collect(),
    };
    write_level_csv(File::create(dir.join("levels.csv"))?, &rows)?;
    Ok(())
}

fn verify_grid(rc: &RunConfig) -> Result<Grid> {
    Ok(Grid::new(rc.grid_l.unwrap_or(VERIFY_HALF_WIDTH), rc.grid_n.unwrap_or(VERIFY_POINTS))?)
}

pub fn verify(args: &VerifyArgs, rc: &RunConfig) -> Result<i32> {
    let grid = verify_grid(rc)?;
    let only = if args.only.is_empty() { rc.only.clone() } else { args.only.clone() };
    let suite = Suite::new(
        rc.params,
        rc.mode,
        args.psusy.or(rc.choice),
        grid.clone(),
        rc.accuracy(),
        rc.tolerances.clone(),
        only,
    )?;
    let records = suite.run()?;
    let ok = all_passed(&records);
    let mut w = open(rc.output.as_deref())?;
    match rc.format {
        Format::Table => {
            writeln!(
                w,
                "{}; grid [-{L}, {L}], n = {}, h = {}; order {}",
                describe(&rc.params),
                grid.n(),
                grid.h(),
                rc.accuracy().order(),
                L = grid.half_width()
            )?;
            write!(w, "{}", records_table(&records))?;
            for r in &records {
                if let Some(c) = &r.convergence {
                    writeln!(
                        w,
                        "convergence {} {}: h {} -> {}, residual {} -> {}, ratio {:.2}, observed order {:.2} (expected {})",
                        r.check,
                        r.case,
                        c.h,
                        c.fine_h,
                        sci(r.measured.unwrap_or(f64::NAN)),
                        sci(c.fine_residual),
                        c.ratio,
                        c.observed_order,
                        c.expected_order
                    )?;
                }
            }
            let failed = records.iter().filter(|r| r.status == Status::Fail).count();
            writeln!(w, "{}: {} checks, {failed} failed", status_word(ok), records.len())?;
        }
        Format::Csv => {
            let mut c = csv_writer(&mut w);
            c.write_record(["check", "case", "measured", "allowed", "status", "observed_order", "note"])?;
            for r in &records {
                c.write_record([
                    r.check.to_string(),
                    r.case.clone(),
                    r.measured.map(|m| m.to_string()).unwrap_or_default(),
                    r.allowed.to_string(),
                    format!("{:?}", r.status).to_lowercase(),
                    r.convergence.as_ref().map(|c| c.observed_order.to_string()).unwrap_or_default(),
                    r.note.clone().unwrap_or_default(),
                ])?;
            }
            c.flush()?;
        }
        Format::Json => {
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "verify",
                "params": rc.params,
                "grid": {"L": grid.half_width(), "n": grid.n(), "h": grid.h()},
                "order": rc.accuracy().order(),
                "checks": records,
                "passed": ok,
            });
            serde_json::to_writer_pretty(&mut w, &report)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(if ok { 0 } else { 1 })
}

fn records_table(records: &[CheckRecord]) -> String {
    let mut t = Table::new(["check", "case", "measured", "allowed", "status"]);
    for r in records {
        let status = match r.status {
            Status::Pass => match &r.note {
                Some(n) => format!("pass ({n})"),
                None => "pass".to_string(),
            },
            Status::Fail => "FAIL".to_string(),
            Status::Skipped => format!("skipped: {}", r.note.as_deref().unwrap_or("")),
        };
        t.row([r.check.to_string(), r.case.clone(), r.measured.map_or("-".into(), sci), sci(r.allowed), status]);
    }
    t.render()
}

fn shape_text(p: &PShape) -> String {
    match *p {
        PShape::Linear { delta } => format!("p = x - i*{delta}"),
        PShape::HalfTanh { k, gamma } => format!("p = {} tanh((x - i*{gamma})/2)", num(k)),
        PShape::TanhSech { k } => format!("p = {} (tanh x + i sech x)", num(k)),
    }
}

pub fn ssusy_map(args: &SsusyMapArgs, rc: &RunConfig) -> Result<i32> {
    let params = rc.params;
    let choices = args.psusy.or(rc.choice).map_or(Choice::BOTH.to_vec(), |c| vec![c]);
    let n_samples = args.samples.or(rc.samples).unwrap_or(9);
    if n_samples < 2 {
        bail!("--samples must be at least 2");
    }
    let l = rc.grid_l.unwrap_or(4.0);
    let xs: Vec<f64> = (0..n_samples).map(|i| -l + 2.0 * l * i as f64 / (n_samples - 1) as f64).collect();
    let check_grid = Grid::new(VERIFY_HALF_WIDTH, 401)?;

    let mut maps: Vec<(SsusyData, f64, f64)> = Vec::new();
    for &c in &choices {
        let data = ssusy_from_family_with(&params, c, rc.mode)?;
        let triplet = build_triplet_with(&params, c, rc.mode)?;
        let dev = ptsusy_core::ssusy::consistency_with_psusy(&params, c, &check_grid, rc.mode)?;
        maps.push((data, triplet.c(), dev));
    }
    let ok = maps.iter().all(|m| m.2 <= SSUSY_MAP_TOL);
    let p_values = |d: &SsusyData| -> Result<Vec<_>> { xs.iter().map(|&x| Ok(d.p.eval(x)?.p)).collect() };
    let p_shift = if maps.len() == 2 {
        let a = p_values(&maps[0].0)?;
        let b = p_values(&maps[1].0)?;
        Some(a.iter().zip(&b).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max))
    } else {
        None
    };

    let mut w = open(rc.output.as_deref())?;
    match rc.format {
        Format::Table => {
            writeln!(w, "{}", describe(&params))?;
            for (d, c12, dev) in &maps {
                writeln!(w, "\n{} choice: {}", d.choice, shape_text(&d.p))?;
                writeln!(w, "  c = {}  (c1 - c2 = {})", num(d.c), num(*c12))?;
                writeln!(w, "  d = {}, a = {}", num(d.d), num(d.a))?;
                writeln!(
                    w,
                    "  PSUSY consistency: measured {} allowed {} {}",
                    sci(*dev),
                    sci(SSUSY_MAP_TOL),
                    status_word(*dev <= SSUSY_MAP_TOL)
                )?;
            }
            if let Some(s) = p_shift {
                writeln!(w, "\nmax|p_first - p_second| over the samples: {}", sci(s))?;
                writeln!(w, "c_first + c_second = {}", num(maps[0].0.c + maps[1].0.c))?;
            }
            let (d0, _, _) = &maps[0];
            writeln!(w)?;
            let mut t = Table::new(["x", "Re p", "Im p"]);
            for (x, p) in xs.iter().zip(p_values(d0)?) {
                t.row([format!("{x:.4}"), format!("{:.10}", p.re), format!("{:.10}", p.im)]);
            }
            write!(w, "{}", t.render())?;
            writeln!(w, "{}", status_word(ok))?;
        }
        Format::Csv => {
            let mut c = csv_writer(&mut w);
            c.write_record(["choice", "c", "x", "re_p", "im_p"])?;
            for (d, _, _) in &maps {
                for (x, p) in xs.iter().zip(p_values(d)?) {
                    c.write_record([
                        d.choice.to_string(),
                        d.c.to_string(),
                        x.to_string(),
                        p.re.to_string(),
                        p.im.to_string(),
                    ])?;
                }
            }
            c.flush()?;
        }
        Format::Json => {
            let mut out = Vec::new();
            for (d, c12, dev) in &maps {
                let samples: Vec<_> =
                    xs.iter().zip(p_values(d)?).map(|(x, p)| json!({"x": x, "re_p": p.re, "im_p": p.im})).collect();
                out.push(json!({
                    "choice": d.choice,
                    "p": d.p,
                    "c": d.c,
                    "c1_minus_c2": c12,
                    "d": d.d,
                    "a": d.a,
                    "psusy_deviation": dev,
                    "allowed": SSUSY_MAP_TOL,
                    "samples": samples,
                }));
            }
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "ssusy-map",
                "params": params,
                "maps": out,
                "p_choice_difference": p_shift,
                "passed": ok,
            });
            serde_json::to_writer_pretty(&mut w, &report)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(if ok { 0 } else { 1 })
}

pub fn eig_dump(args: &EigDumpArgs, rc: &RunConfig) -> Result<i32> {
    let settings = rc.grid_settings();
    let grid = settings.grid()?;
    let m = discretize_potential(&rc.params, &grid, settings.order)?;
    let mut eig = eig_with(&m, &EigenOptions::default());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].re.total_cmp(&eig.eigenvalues[b].re));
    if let Some(path) = &args.matrix_out {
        let mut c = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
        c.write_record(["row", "col", "re", "im"])?;
        for i in 0..m.dim() {
            for (j, z) in m.row(i).iter().enumerate() {
                if z.re != 0.0 || z.im != 0.0 {
                    c.write_record([i.to_string(), j.to_string(), z.re.to_string(), z.im.to_string()])?;
                }
            }
        }
        c.flush()?;
    }
    eig.compute_all_eigenvectors(&m);
    let ok = eig.all_converged();
    let mut w = open(rc.output.as_deref())?;
    match rc.format {
        Format::Table => {
            writeln!(
                w,
                "{}; L = {}, n = {}, order {}; {:?} path, {} sweeps",
                describe(&rc.params),
                settings.half_width,
                settings.n,
                settings.order.order(),
                eig.path,
                eig.iterations
            )?;
            let mut t = Table::new(["index", "Re E", "Im E", "converged", "residual"]);
            for (k, &i) in order.iter().enumerate() {
                let z = eig.eigenvalues[i];
                let r = eig.residuals.as_ref().and_then(|r| r[i]);
                t.row([
                    k.to_string(),
                    z.re.to_string(),
                    z.im.to_string(),
                    eig.converged[i].to_string(),
                    r.map_or("-".into(), sci),
                ]);
            }
            write!(w, "{}", t.render())?;
        }
        Format::Csv => {
            let mut c = csv_writer(&mut w);
            c.write_record(["index", "re", "im", "converged", "residual"])?;
            for (k, &i) in order.iter().enumerate() {
                let z = eig.eigenvalues[i];
                let r = eig.residuals.as_ref().and_then(|r| r[i]);
                c.write_record([
                    k.to_string(),
                    z.re.to_string(),
                    z.im.to_string(),
                    eig.converged[i].to_string(),
                    r.map(|r| r.to_string()).unwrap_or_default(),
                ])?;
            }
            c.flush()?;
        }
        Format::Json => {
            let values: Vec<_> = order
                .iter()
                .map(|&i| {
                    json!({
                        "re": eig.eigenvalues[i].re,
                        "im": eig.eigenvalues[i].im,
                        "converged": eig.converged[i],
                        "residual": eig.residuals.as_ref().and_then(|r| r[i]),
                    })
                })
                .collect();
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "eig-dump",
                "params": rc.params,
                "grid": settings,
                "path": eig.path,
                "iterations": eig.iterations,
                "eigenvalues": values,
                "passed": ok,
            });
            serde_json::to_writer_pretty(&mut w, &report)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(if ok { 0 } else { 1 })
}

/// Help text appended to `verify --help`.
pub fn verify_help() -> String {
    tolerance_table()
}
