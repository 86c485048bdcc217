//! `key = value` configuration files and their merge with flags.

use std::collections::HashMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use robe_stability::curves::CurveConfig;
use robe_stability::monodromy::IntegratorConfig;
use robe_stability::spectral::SpectralConfig;

use crate::UsageError;

/// Keys accepted in a configuration file.
pub const KEYS: &[&str] = &[
    "integrator_tol",
    "zero_band",
    "bisection_tol",
    "classify_tol",
    "truncation",
    "truncation_step",
    "max_truncation",
    "e_max",
    "steps",
    "mu_steps",
    "e_steps",
    "out",
    "format",
];

/// Parsed configuration file. Blank lines and lines starting with `#` are
/// ignored.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: HashMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| UsageError(format!("{}: {}", path.display(), e.0)))
    }

    pub fn parse(text: &str) -> Result<Self, UsageError> {
        let mut values = HashMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| UsageError(format!("line {}: expected key = value", n + 1)))?;
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(UsageError(format!("line {}: unknown key '{key}'", n + 1)));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { values })
    }

    /// `flag`, else the file value of `key`, else `None`.
    pub fn pick<T>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, UsageError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.values
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| UsageError(format!("config key {key} = '{v}': {e}")))
            })
            .transpose()
    }
}

/// Output format of a subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format '{other}' (json or csv)")),
        }
    }
}

/// Solver settings shared by all subcommands, after merging file and flags.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub integrator: IntegratorConfig,
    pub spectral: SpectralConfig,
    pub bisection_tol: f64,
    pub classify_tol: f64,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn curves(&self) -> CurveConfig {
        CurveConfig {
            spectral: self.spectral,
            integrator: self.integrator,
            bisection_tol: self.bisection_tol,
            classify_tol: self.classify_tol,
            ..CurveConfig::default()
        }
    }
}

/// Flags that every subcommand understands.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct SolverFlags {
    /// `key = value` file; flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Integrator tolerance (Richardson estimate and symplectic residual).
    #[arg(long, global = true)]
    pub integrator_tol: Option<f64>,
    /// Relative width of the band around 0 counted as null spectrum.
    #[arg(long, global = true)]
    pub zero_band: Option<f64>,
    /// Width of the final bisection cell in μ.
    #[arg(long, global = true)]
    pub bisection_tol: Option<f64>,
    /// Distance to the unit circle below which an eigenvalue is elliptic.
    #[arg(long, global = true)]
    pub classify_tol: Option<f64>,
    /// Base Galerkin truncation order N (at least 4).
    #[arg(long, global = true)]
    pub truncation: Option<usize>,
    /// Increment between the orders compared for convergence.
    #[arg(long, global = true)]
    pub truncation_step: Option<usize>,
    /// Largest truncation order tried.
    #[arg(long, global = true)]
    pub max_truncation: Option<usize>,
    /// Output file (standard output when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

fn positive(name: &str, v: f64) -> Result<f64, UsageError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(UsageError(format!(
            "{name} must be a positive number, got {v}"
        )))
    }
}

impl SolverFlags {
    pub fn file(&self) -> Result<ConfigFile, UsageError> {
        match &self.config {
            Some(path) => ConfigFile::load(path),
            None => Ok(ConfigFile::default()),
        }
    }

    pub fn resolve(&self, file: &ConfigFile) -> Result<RunConfig, UsageError> {
        let mut integrator = IntegratorConfig::default();
        if let Some(t) = file.pick("integrator_tol", self.integrator_tol)? {
            integrator.tolerance = positive("integrator tolerance", t)?;
        }
        let mut spectral = SpectralConfig::default();
        if let Some(z) = file.pick("zero_band", self.zero_band)? {
            spectral.zero_band = positive("zero band", z)?;
        }
        if let Some(n) = file.pick("truncation", self.truncation)? {
            spectral.truncation = n;
        }
        if let Some(s) = file.pick("truncation_step", self.truncation_step)? {
            spectral.step = s;
        }
        spectral.max_truncation = match file.pick("max_truncation", self.max_truncation)? {
            Some(m) => m,
            None => spectral
                .max_truncation
                .max(spectral.truncation + 4 * spectral.step),
        };
        spectral.validate().map_err(|e| UsageError(e.to_string()))?;
        let defaults = CurveConfig::default();
        let bisection_tol = positive(
            "bisection tolerance",
            file.pick("bisection_tol", self.bisection_tol)?
                .unwrap_or(defaults.bisection_tol),
        )?;
        let classify_tol = positive(
            "classify tolerance",
            file.pick("classify_tol", self.classify_tol)?
                .unwrap_or(defaults.classify_tol),
        )?;
        Ok(RunConfig {
            integrator,
            spectral,
            bisection_tol,
            classify_tol,
            out: file.pick("out", self.out.clone())?,
            format: file.pick("format", self.format)?,
        })
    }
}
