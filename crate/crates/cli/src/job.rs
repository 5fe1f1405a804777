use std::path::Path;

use atypical::newton::GammaInfReading;
use clap::{Args, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Newton,
    Badfaces,
    Nondeg,
    Sigma,
    K0,
    Kinf,
    Mtame,
    Trivialize,
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Reading {
    #[default]
    Exists,
    Forall,
}

impl From<Reading> for GammaInfReading {
    fn from(r: Reading) -> Self {
        match r {
            Reading::Exists => GammaInfReading::Exists,
            Reading::Forall => GammaInfReading::Forall,
        }
    }
}

/// A complete analysis request. The job file format is this struct as JSON.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: CommandKind,
    pub vars: Vec<String>,
    #[serde(alias = "map")]
    pub polynomials: Vec<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub radii: Option<Vec<f64>>,
    #[serde(default)]
    pub gamma_inf_reading: Reading,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub restarts: Option<usize>,
    /// `R`-independent target value, coordinates as expressions
    #[serde(default)]
    pub target: Option<Vec<String>>,
    #[serde(default)]
    pub seed_curves: Vec<String>,
    #[serde(default)]
    pub start: Option<Vec<String>>,
    /// waypoints, each a list of coordinate expressions
    #[serde(default)]
    pub path: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub step: Option<f64>,
}

fn default_budget() -> usize {
    64
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Newton polyhedra at infinity, bad faces and face tuples
    Newton(MapArgs),
    /// Bad faces of every component
    Badfaces(MapArgs),
    /// Non-degeneracy verdict for every face tuple at infinity
    Nondeg(MapArgs),
    /// The outer bound: K0, Sigma_inf and the coordinate hyperplanes
    Sigma(MapArgs),
    /// Critical values
    K0(MapArgs),
    /// Probe for asymptotic critical values of Rabier type
    Kinf(MapArgs),
    /// Probe for values where the map fails to be tame at infinity
    Mtame(MapArgs),
    /// Transport a point of one fiber along a path of values
    Trivialize(MapArgs),
}

#[derive(Debug, Args)]
pub struct MapArgs {
    /// comma-separated variable names, in order
    #[arg(long, value_delimiter = ',')]
    pub vars: Vec<String>,
    /// one expression per component
    #[arg(long, num_args = 1..)]
    pub map: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub budget: usize,
    #[arg(long)]
    pub tol: Option<f64>,
    /// comma-separated, strictly increasing
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    /// which components must miss the origin on a face tuple at infinity
    /// (the defining condition is ambiguous; `exists` is the default)
    #[arg(long, value_enum, default_value_t = Reading::Exists)]
    pub gamma_inf_reading: Reading,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// comma-separated coordinates, e.g. `0,0` or `-1,(1+2i)`
    #[arg(long, allow_hyphen_values = true)]
    pub target: Option<String>,
    /// `c:e,...` per variable, seeding a track with `x_i = c_i R^e_i`
    #[arg(long = "seed-curve", allow_hyphen_values = true)]
    pub seed_curves: Vec<String>,
    /// starting point, comma-separated
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<String>,
    /// waypoints separated by `;`, coordinates by `,`
    #[arg(long, allow_hyphen_values = true)]
    pub path: Option<String>,
    #[arg(long)]
    pub step: Option<f64>,
}

fn split_coords(s: &str) -> Vec<String> {
    s.split(',').map(|c| c.trim().to_string()).collect()
}

impl MapArgs {
    pub fn into_job(self, command: CommandKind) -> JobSpec {
        JobSpec {
            command,
            vars: self.vars,
            polynomials: self.map,
            seed: self.seed,
            budget: self.budget,
            tol: self.tol,
            radii: self.radii,
            gamma_inf_reading: self.gamma_inf_reading,
            format: self.format,
            restarts: self.restarts,
            target: self.target.as_deref().map(split_coords),
            seed_curves: self.seed_curves,
            start: self.start.as_deref().map(split_coords),
            path: self.path.as_deref().map(|p| p.split(';').map(split_coords).collect()),
            step: self.step,
        }
    }
}

impl Command {
    pub fn into_job(self) -> JobSpec {
        match self {
            Command::Newton(a) => a.into_job(CommandKind::Newton),
            Command::Badfaces(a) => a.into_job(CommandKind::Badfaces),
            Command::Nondeg(a) => a.into_job(CommandKind::Nondeg),
            Command::Sigma(a) => a.into_job(CommandKind::Sigma),
            Command::K0(a) => a.into_job(CommandKind::K0),
            Command::Kinf(a) => a.into_job(CommandKind::Kinf),
            Command::Mtame(a) => a.into_job(CommandKind::Mtame),
            Command::Trivialize(a) => a.into_job(CommandKind::Trivialize),
        }
    }
}

pub fn read_job(path: &Path) -> Result<JobSpec, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("malformed job file {}: {e}", path.display()))
}

/// Parses a coordinate: a decimal number, or a constant expression such as
/// `1/2` or `(3-2i)`.
pub fn parse_value(s: &str) -> Result<Complex64, String> {
    if let Ok(x) = s.trim().parse::<f64>() {
        return Ok(Complex64::new(x, 0.0));
    }
    let p = atypical::poly::parse_poly(s, &[]).map_err(|e| format!("bad value `{s}`: {e}"))?;
    Ok(p.constant_term().to_complex())
}

pub fn parse_values(coords: &[String]) -> Result<Vec<Complex64>, String> {
    coords.iter().map(|c| parse_value(c)).collect()
}
