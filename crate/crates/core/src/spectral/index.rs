//! ω-Morse index and nullity of the truncated operator.

use serde::Serialize;

use super::operator::{assemble_operator, TruncatedOperator, MIN_TRUNCATION};
use crate::error::{Error, Result};
use crate::model::{ParameterPoint, UnitCirclePoint};

/// Truncation and zero-band controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralConfig {
    /// Base truncation order `N`.
    pub truncation: usize,
    /// Increment between the three orders compared for convergence.
    pub step: usize,
    /// Largest order ever assembled.
    pub max_truncation: usize,
    /// Eigenvalues within `zero_band · max|diag|` of 0 count as null.
    pub zero_band: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            truncation: 32,
            step: 8,
            max_truncation: 64,
            zero_band: 1e-8,
        }
    }
}

impl SpectralConfig {
    pub fn validate(&self) -> Result<()> {
        if self.truncation < MIN_TRUNCATION {
            return Err(Error::InvalidParameter {
                name: "truncation",
                value: self.truncation as f64,
                reason: "must be at least 4",
            });
        }
        if self.step == 0 {
            return Err(Error::InvalidParameter {
                name: "truncation step",
                value: 0.0,
                reason: "must be positive",
            });
        }
        if self.truncation + 2 * self.step > self.max_truncation {
            return Err(Error::InvalidParameter {
                name: "max truncation",
                value: self.max_truncation as f64,
                reason: "must allow truncation + 2 * step",
            });
        }
        if !(self.zero_band > 0.0 && self.zero_band.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "zero band",
                value: self.zero_band,
                reason: "must be positive",
            });
        }
        Ok(())
    }
}

/// `(i_ω, ν_ω)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct IndexPair {
    pub index: usize,
    pub nullity: usize,
}

/// An [`IndexPair`] together with the base truncation order that converged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IndexResult {
    pub pair: IndexPair,
    pub truncation_used: usize,
}

/// Negative and near-zero eigenvalue counts of one truncation.
pub fn count_spectrum(op: &TruncatedOperator, epsilon: f64) -> Result<IndexPair> {
    let ev = op.eigenvalues()?;
    Ok(IndexPair {
        index: ev.iter().filter(|&&l| l < -epsilon).count(),
        nullity: ev.iter().filter(|&&l| l.abs() <= epsilon).count(),
    })
}

/// `(i_ω, ν_ω)` as the Morse index and nullity of `A(μ,e)` on the
/// ω-boundary condition.
///
/// Counts are taken at orders `N`, `N + step`, `N + 2 step` and accepted when
/// all three agree; otherwise `N` grows by `step` until
/// `N + 2 step > max_truncation`. The zero band is fixed by the diagonal of
/// the base order.
pub fn morse_index_nullity(
    p: &ParameterPoint,
    w: UnitCirclePoint,
    cfg: &SpectralConfig,
) -> Result<IndexResult> {
    cfg.validate()?;
    let mut base = cfg.truncation;
    while base + 2 * cfg.step <= cfg.max_truncation {
        let top = assemble_operator(p, w, base + 2 * cfg.step)?;
        let epsilon = cfg.zero_band * top.truncated(base).diagonal_scale();
        let counts = [base, base + cfg.step, base + 2 * cfg.step]
            .iter()
            .map(|&n| count_spectrum(&top.truncated(n), epsilon))
            .collect::<Result<Vec<_>>>()?;
        if counts.iter().all(|c| *c == counts[0]) {
            return Ok(IndexResult {
                pair: counts[0],
                truncation_used: base,
            });
        }
        base += cfg.step;
    }
    Err(Error::TruncationNotConverged {
        max_truncation: cfg.max_truncation,
        mu: p.mu(),
        e: p.e(),
        omega_angle: w.angle(),
    })
}

/// Number of strictly negative eigenvalues at order `n`; the sign-only
/// predicate used for root location.
pub fn negative_count(p: &ParameterPoint, w: UnitCirclePoint, n: usize) -> Result<usize> {
    let ev = assemble_operator(p, w, n)?.eigenvalues()?;
    Ok(ev.iter().filter(|&&l| l < 0.0).count())
}
