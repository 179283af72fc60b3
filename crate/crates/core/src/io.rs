//! Spectrum tables, level diagrams and plot data as CSV and JSON.
//!
//! Floats are written in their shortest round-trip form, so reading a file
//! back gives bit-identical values.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::Grid;
use crate::potentials::{LevelIndex, PotentialError, PotentialParams};
use crate::psusy::{Choice, Component, SpectrumEntry};
use crate::special::C64;

/// Version of the JSON documents written here.
pub const SCHEMA_VERSION: u32 = 1;

pub const SPECTRUM_HEADER: [&str; 4] = ["index", "energy", "degeneracy", "members"];
pub const LEVEL_HEADER: [&str; 3] = ["index", "energy", "degeneracy"];
pub const PLOT_HEADER: [&str; 5] = ["x", "re_v", "im_v", "re_psi", "im_psi"];

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("unexpected header {found:?}, expected {expected:?}")]
    Header { found: Vec<String>, expected: Vec<String> },
    #[error("row {row}: {msg}")]
    Row { row: usize, msg: String },
    #[error("schema version {found} is not supported (expected {SCHEMA_VERSION})")]
    Schema { found: u32 },
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

/// `H1:+0;H2:-1` style member list.
pub fn format_members(members: &[(Component, LevelIndex)]) -> String {
    members.iter().map(|(c, l)| format!("{c}:{l}")).collect::<Vec<_>>().join(";")
}

pub fn parse_members(s: &str) -> Result<Vec<(Component, LevelIndex)>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|item| {
            let (c, l) = item.split_once(':').ok_or_else(|| format!("member `{item}` lacks `:`"))?;
            Ok((c.parse()?, l.parse()?))
        })
        .collect()
}

fn check_header(found: &csv::StringRecord, expected: &[&str]) -> Result<(), FormatError> {
    if found.iter().eq(expected.iter().copied()) {
        Ok(())
    } else {
        Err(FormatError::Header {
            found: found.iter().map(str::to_owned).collect(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, row: usize) -> Result<T, FormatError>
where
    T::Err: std::fmt::Display,
{
    let raw = rec.get(i).ok_or_else(|| FormatError::Row { row, msg: format!("missing column {i}") })?;
    raw.trim().parse().map_err(|e| FormatError::Row { row, msg: format!("column {i} ({raw:?}): {e}") })
}

pub fn write_spectrum_csv<W: Write>(out: W, entries: &[SpectrumEntry]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SPECTRUM_HEADER)?;
    for (i, e) in entries.iter().enumerate() {
        w.write_record([i.to_string(), e.energy.to_string(), e.degeneracy.to_string(), format_members(&e.members)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_spectrum_csv<R: Read>(input: R) -> Result<Vec<SpectrumEntry>, FormatError> {
    let mut r = csv::Reader::from_reader(input);
    check_header(r.headers()?, &SPECTRUM_HEADER)?;
    let mut out = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let members_raw = rec.get(3).unwrap_or("");
        let members = parse_members(members_raw).map_err(|msg| FormatError::Row { row, msg })?;
        out.push(SpectrumEntry { energy: field(&rec, 1, row)?, degeneracy: field(&rec, 2, row)?, members });
    }
    Ok(out)
}

/// Versioned JSON wrapper around a merged spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDocument {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<PotentialParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choice: Option<Choice>,
    pub entries: Vec<SpectrumEntry>,
}

impl SpectrumDocument {
    pub fn new(params: Option<PotentialParams>, choice: Option<Choice>, entries: Vec<SpectrumEntry>) -> Self {
        Self { schema_version: SCHEMA_VERSION, params, choice, entries }
    }
}

pub fn write_spectrum_json<W: Write>(out: W, doc: &SpectrumDocument) -> Result<(), FormatError> {
    serde_json::to_writer_pretty(out, doc)?;
    Ok(())
}

pub fn read_spectrum_json<R: Read>(input: R) -> Result<SpectrumDocument, FormatError> {
    let doc: SpectrumDocument = serde_json::from_reader(input)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(FormatError::Schema { found: doc.schema_version });
    }
    Ok(doc)
}

/// `(index, energy, degeneracy)` rows for a level diagram.
pub fn level_diagram(entries: &[SpectrumEntry]) -> Vec<(usize, f64, usize)> {
    entries.iter().enumerate().map(|(i, e)| (i, e.energy, e.degeneracy)).collect()
}

pub fn write_level_csv<W: Write>(out: W, rows: &[(usize, f64, usize)]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(LEVEL_HEADER)?;
    for (i, e, d) in rows {
        w.write_record([i.to_string(), e.to_string(), d.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlotSample {
    pub x: f64,
    pub v: C64,
    pub psi: C64,
}

/// Potential and one closed-form eigenfunction sampled on a grid.
pub fn plot_samples(params: &PotentialParams, level: LevelIndex, grid: &Grid) -> Result<Vec<PlotSample>, FormatError> {
    grid.points()
        .iter()
        .map(|&x| Ok(PlotSample { x, v: params.potential_value(x)?, psi: params.eigenfunction(level, x)? }))
        .collect()
}

pub fn write_plot_csv<W: Write>(out: W, samples: &[PlotSample]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PLOT_HEADER)?;
    for s in samples {
        w.write_record([
            s.x.to_string(),
            s.v.re.to_string(),
            s.v.im.to_string(),
            s.psi.re.to_string(),
            s.psi.im.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_plot_csv<R: Read>(input: R) -> Result<Vec<PlotSample>, FormatError> {
    let mut r = csv::Reader::from_reader(input);
    check_header(r.headers()?, &PLOT_HEADER)?;
    let mut out = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        out.push(PlotSample {
            x: field(&rec, 0, row)?,
            v: C64::new(field(&rec, 1, row)?, field(&rec, 2, row)?),
            psi: C64::new(field(&rec, 3, row)?, field(&rec, 4, row)?),
        });
    }
    Ok(out)
}
