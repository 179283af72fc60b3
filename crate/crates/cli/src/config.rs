//! Command-line flags, the TOML config file and their merge into a
//! [`RunConfig`]. Flags win over the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use ptsusy_core::numerics::{FdAccuracy, GridSettings, StencilOrder};
use ptsusy_core::{Choice, Family, PotentialParams, ValidationMode};

use crate::checks::Tolerances;

#[derive(Debug, Parser)]
#[command(name = "ptsusy", version, about = "PT-symmetric SUSY, PSUSY and SSUSY spectra and identity checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form towers, the PSUSY merged spectrum and an optional numerical check
    Spectrum(SpectrumArgs),
    /// Run the operator identity suite and compare every residual with its tolerance
    Verify(VerifyArgs),
    /// Show the SSUSY data (p, c, d) and its agreement with the PSUSY triplet
    SsusyMap(SsusyMapArgs),
    /// Discretize the Hamiltonian and dump its eigenvalues (and optionally the matrix)
    EigDump(EigDumpArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML file with defaults for any of the flags below
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// oscillator, poschl-teller (pt) or scarf
    #[arg(long)]
    pub family: Option<Family>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long = "A", allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long = "B", allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Accept integer parameter ties (single-series towers)
    #[arg(long)]
    pub limiting: bool,
    /// Half-width L of the grid [-L, L]
    #[arg(long = "grid-L", value_name = "L")]
    pub grid_l: Option<f64>,
    /// Number of interior grid points
    #[arg(long = "grid-n", value_name = "N")]
    pub grid_n: Option<usize>,
    /// Finite-difference accuracy order, 2 or 4
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Override a tolerance, e.g. --tol constraint=1e-9 (repeatable)
    #[arg(long = "tol", value_name = "CHECK=VALUE")]
    pub tol: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Also build the PSUSY triplet and print its merged spectrum
    #[arg(long)]
    pub psusy: Option<Choice>,
    /// Diagonalize the discretized Hamiltonian and match against the towers
    #[arg(long)]
    pub numeric: bool,
    /// Levels per unbounded tower, and entries of the merged spectrum
    #[arg(long)]
    pub max_levels: Option<usize>,
    /// Energy cutoff for the numerical match
    #[arg(long, allow_hyphen_values = true)]
    pub cutoff: Option<f64>,
    /// Directory for plot data: potential.csv and levels.csv
    #[arg(long, value_name = "DIR")]
    pub plot_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Restrict the PSUSY and SSUSY checks to one choice (default: both)
    #[arg(long)]
    pub psusy: Option<Choice>,
    /// Comma-separated subset of checks to run
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct SsusyMapArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Restrict to one choice (default: both)
    #[arg(long)]
    pub psusy: Option<Choice>,
    /// Number of p(x) samples across [-L, L]
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct EigDumpArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Also write the matrix as (row, col, re, im) CSV
    #[arg(long, value_name = "FILE")]
    pub matrix_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub n: Option<usize>,
    pub order: Option<usize>,
}

/// Contents of `--config`. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub family: Option<Family>,
    pub alpha: Option<f64>,
    pub delta: Option<f64>,
    #[serde(rename = "A")]
    pub a: Option<f64>,
    #[serde(rename = "B")]
    pub b: Option<f64>,
    pub gamma: Option<f64>,
    pub limiting: Option<bool>,
    pub psusy: Option<Choice>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub max_levels: Option<usize>,
    pub cutoff: Option<f64>,
    pub samples: Option<usize>,
    pub only: Option<Vec<String>>,
    #[serde(default)]
    pub grid: GridFile,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Everything a subcommand needs, validated.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: PotentialParams,
    pub mode: ValidationMode,
    pub choice: Option<Choice>,
    pub grid_l: Option<f64>,
    pub grid_n: Option<usize>,
    pub order: Option<usize>,
    pub tolerances: Tolerances,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub max_levels: Option<usize>,
    pub cutoff: Option<f64>,
    pub samples: Option<usize>,
    pub only: Vec<String>,
}

fn need(v: Option<f64>, flag: &str, family: Family) -> Result<f64> {
    v.ok_or_else(|| anyhow!("{family} needs --{flag}"))
}

impl RunConfig {
    pub fn resolve(common: &CommonArgs, file: Option<ConfigFile>) -> Result<Self> {
        let file = match (&common.config, file) {
            (_, Some(f)) => f,
            (Some(path), None) => ConfigFile::load(path)?,
            (None, None) => ConfigFile::default(),
        };
        let family = common.family.or(file.family).ok_or_else(|| anyhow!("--family is required"))?;
        let pick = |flag: Option<f64>, key: Option<f64>| flag.or(key);
        let alpha = pick(common.alpha, file.alpha);
        let delta = pick(common.delta, file.delta);
        let a = pick(common.a, file.a);
        let b = pick(common.b, file.b);
        let gamma = pick(common.gamma, file.gamma);
        let params = match family {
            Family::Oscillator => {
                PotentialParams::oscillator(need(alpha, "alpha", family)?, need(delta, "delta", family)?)
            }
            Family::PoschlTeller => PotentialParams::poschl_teller(
                need(a, "A", family)?,
                need(b, "B", family)?,
                need(gamma, "gamma", family)?,
            ),
            Family::Scarf => PotentialParams::scarf(need(a, "A", family)?, need(b, "B", family)?),
        };
        let mode = if common.limiting || file.limiting.unwrap_or(false) {
            ValidationMode::Limiting
        } else {
            ValidationMode::Strict
        };
        params.validate(mode).map_err(|e| anyhow!("invalid {family} parameters: {e}"))?;

        let order = common.order.or(file.grid.order);
        if let Some(o) = order {
            if FdAccuracy::from_order(o).is_none() {
                bail!("--order must be 2 or 4 (got {o})");
            }
        }
        let grid_l = common.grid_l.or(file.grid.l);
        if let Some(l) = grid_l {
            if !(l.is_finite() && l > 0.0) {
                bail!("--grid-L must be positive (got {l})");
            }
        }

        let mut tolerances = Tolerances::default();
        for (k, v) in &file.tolerances {
            tolerances.set(k, *v)?;
        }
        for item in &common.tol {
            let (k, v) = item.split_once('=').ok_or_else(|| anyhow!("--tol expects CHECK=VALUE (got {item:?})"))?;
            let v: f64 = v.trim().parse().with_context(|| format!("--tol {item}"))?;
            tolerances.set(k.trim(), v)?;
        }

        Ok(Self {
            params,
            mode,
            choice: file.psusy,
            grid_l,
            grid_n: common.grid_n.or(file.grid.n),
            order,
            tolerances,
            format: common.format.or(file.format).unwrap_or_default(),
            output: common.output.clone().or(file.output),
            max_levels: file.max_levels,
            cutoff: file.cutoff,
            samples: file.samples,
            only: file.only.unwrap_or_default(),
        })
    }

    pub fn accuracy(&self) -> FdAccuracy {
        self.order.and_then(FdAccuracy::from_order).unwrap_or(FdAccuracy::Fourth)
    }

    /// Discretization box for the eigensolver: family defaults, then overrides.
    pub fn grid_settings(&self) -> GridSettings {
        let mut g = GridSettings::default_for(&self.params);
        if let Some(l) = self.grid_l {
            g.half_width = l;
        }
        if let Some(n) = self.grid_n {
            g.n = n;
        }
        if let Some(o) = self.order.and_then(StencilOrder::from_order) {
            g.order = o;
        }
        g
    }
}
