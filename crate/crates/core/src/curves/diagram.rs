//! Uniform sweep of the `(μ, e)` rectangle.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::uniform_grid;
use crate::error::{Error, Result};
use crate::model::{ParameterPoint, UnitCirclePoint};
use crate::monodromy::{
    classify_stability, integrate_monodromy, IntegratorConfig, StabilityClass, DEFAULT_CLASSIFY_TOL,
};
use crate::spectral::{morse_index_nullity, IndexPair, SpectralConfig};

/// Grid and solver settings of [`sweep_diagram`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagramConfig {
    pub spectral: SpectralConfig,
    pub integrator: IntegratorConfig,
    pub classify_tol: f64,
    pub e_max: f64,
    /// Extra ω angles at which the index is sampled besides `±1`.
    pub omega_angles: Vec<f64>,
}

impl Default for DiagramConfig {
    fn default() -> Self {
        Self {
            spectral: SpectralConfig::default(),
            integrator: IntegratorConfig::default(),
            classify_tol: DEFAULT_CLASSIFY_TOL,
            e_max: 0.95,
            omega_angles: Vec::new(),
        }
    }
}

/// `(i_ω, ν_ω)` at one sampled angle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledIndex {
    pub omega_angle: f64,
    pub pair: Option<IndexPair>,
}

/// One grid point of the stability diagram. Fields that failed to compute
/// are `None` and the reason is listed in `errors`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagramRow {
    pub mu: f64,
    pub e: f64,
    pub stability: Option<StabilityClass>,
    pub index_one: Option<IndexPair>,
    pub index_minus_one: Option<IndexPair>,
    pub sampled: Vec<SampledIndex>,
    pub errors: Vec<String>,
}

impl DiagramRow {
    pub fn eigenvalues(&self) -> Option<[Complex64; 4]> {
        self.stability.as_ref().map(|s| s.eigenvalues)
    }
}

fn evaluate(mu: f64, e: f64, cfg: &DiagramConfig) -> DiagramRow {
    let mut errors = Vec::new();
    let p = match ParameterPoint::new(mu, e) {
        Ok(p) => p,
        Err(err) => {
            return DiagramRow {
                mu,
                e,
                stability: None,
                index_one: None,
                index_minus_one: None,
                sampled: Vec::new(),
                errors: vec![err.to_string()],
            }
        }
    };
    let mut record = |r: Result<IndexPair>| match r {
        Ok(pair) => Some(pair),
        Err(err) => {
            errors.push(err.to_string());
            None
        }
    };
    let index_at = |angle: f64| {
        morse_index_nullity(&p, UnitCirclePoint::new(angle), &cfg.spectral).map(|r| r.pair)
    };
    let index_one = record(index_at(0.0));
    let index_minus_one = record(index_at(std::f64::consts::PI));
    let sampled = cfg
        .omega_angles
        .iter()
        .map(|&a| SampledIndex {
            omega_angle: UnitCirclePoint::new(a).angle(),
            pair: record(index_at(a)),
        })
        .collect();
    let stability = match integrate_monodromy(&p, &cfg.integrator) {
        Ok(m) => Some(classify_stability(&m, cfg.classify_tol)),
        Err(err) => {
            errors.push(err.to_string());
            None
        }
    };
    DiagramRow {
        mu,
        e,
        stability,
        index_one,
        index_minus_one,
        sampled,
        errors,
    }
}

/// Evaluates every point of the uniform `mu_steps × e_steps` grid over
/// `[0, 1] × [0, e_max]`, in e-major then μ order. Per-point failures are
/// recorded in the row and never abort the sweep.
pub fn sweep_diagram(
    mu_steps: usize,
    e_steps: usize,
    cfg: &DiagramConfig,
) -> Result<Vec<DiagramRow>> {
    for (name, steps) in [("mu steps", mu_steps), ("e steps", e_steps)] {
        if steps < 2 {
            return Err(Error::InvalidParameter {
                name,
                value: steps as f64,
                reason: "must be at least 2",
            });
        }
    }
    if !(cfg.e_max.is_finite()
        && (0.0..crate::model::DEFAULT_E_MAX + f64::EPSILON).contains(&cfg.e_max))
    {
        return Err(Error::InvalidParameter {
            name: "e_max",
            value: cfg.e_max,
            reason: "must lie in [0, 0.99]",
        });
    }
    cfg.spectral.validate()?;
    let points: Vec<(f64, f64)> = uniform_grid(cfg.e_max, e_steps - 1)
        .into_iter()
        .flat_map(|e| {
            uniform_grid(1.0, mu_steps - 1)
                .into_iter()
                .map(move |mu| (mu, e))
        })
        .collect();
    Ok(points
        .par_iter()
        .map(|&(mu, e)| evaluate(mu, e, cfg))
        .collect())
}
