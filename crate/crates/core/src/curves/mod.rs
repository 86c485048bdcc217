//! The separation curves of the stability diagram.
//!
//! * `Γ_l`: the hyperbolic boundary `μ_l(e)`, below which the monodromy
//!   spectrum avoids the unit circle.
//! * `Γ_m`, `Γ_r`: the two `-1`-degenerate curves `μ_m(e) ≤ μ_r(e)`, where
//!   the `-1`-index steps from 0 to 1 and from 1 to 2.
//!
//! Both kinds of root are located by bisection on monotone predicates over
//! a fixed dyadic grid of `[0, 1]`, which makes results independent of the
//! starting bracket.

mod diagram;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ParameterPoint, UnitCirclePoint};
use crate::monodromy::{
    eigenvalues_symplectic, integrate_monodromy, IntegratorConfig, DEFAULT_CLASSIFY_TOL,
};
use crate::spectral::{morse_index_nullity, mu_star, negative_count, SpectralConfig};

pub use diagram::{sweep_diagram, DiagramConfig, DiagramRow, SampledIndex};

/// Controls shared by curve location and tracing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveConfig {
    pub spectral: SpectralConfig,
    pub integrator: IntegratorConfig,
    /// Width of the dyadic cells used by the bisections.
    pub bisection_tol: f64,
    /// Distance to the unit circle below which an eigenvalue is elliptic.
    pub classify_tol: f64,
    /// Degenerate values closer than this are merged into one location.
    pub merge_tol: f64,
    /// The hyperbolic boundary is sought in `[δ, 1 - δ]`.
    pub delta: f64,
    /// Largest eccentricity accepted for tracing.
    pub e_max: f64,
}

impl Default for CurveConfig {
    fn default() -> Self {
        Self {
            spectral: SpectralConfig::default(),
            integrator: IntegratorConfig::default(),
            bisection_tol: 1e-10,
            classify_tol: DEFAULT_CLASSIFY_TOL,
            merge_tol: 1e-7,
            delta: 1e-6,
            e_max: 0.95,
        }
    }
}

impl CurveConfig {
    fn levels(&self) -> u32 {
        (1.0 / self.bisection_tol).log2().ceil().clamp(1.0, 52.0) as u32
    }
}

/// A `μ` value where the ω-index jumps by `multiplicity`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegenerateMu {
    pub mu: f64,
    pub multiplicity: usize,
}

/// Smallest grid index `i ∈ (lo, hi]` with `pred(i / 2^levels)`, given
/// `!pred(lo)` and `pred(hi)`.
fn dyadic_bisect<P>(levels: u32, mut lo: u64, mut hi: u64, pred: &P) -> Result<u64>
where
    P: Fn(f64) -> Result<bool>,
{
    let scale = (1u64 << levels) as f64;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid as f64 / scale)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Transition of a monotone predicate on `[lo_mu, hi_mu]`, optionally
/// starting from a warm bracket that is verified before use. Returns the
/// midpoint of the transition cell.
fn locate<P>(levels: u32, lo_mu: f64, hi_mu: f64, warm: Option<(f64, f64)>, pred: &P) -> Result<f64>
where
    P: Fn(f64) -> Result<bool>,
{
    let scale = (1u64 << levels) as f64;
    let to_grid = |mu: f64| (mu * scale).round().clamp(0.0, scale) as u64;
    let (full_lo, full_hi) = (to_grid(lo_mu), to_grid(hi_mu));
    let mut bracket = (full_lo, full_hi);
    if let Some((a, b)) = warm {
        let (a, b) = (to_grid(a).max(full_lo), to_grid(b).min(full_hi));
        if a < b && !pred(a as f64 / scale)? && pred(b as f64 / scale)? {
            bracket = (a, b);
        }
    }
    let i = dyadic_bisect(levels, bracket.0, bracket.1, pred)?;
    Ok((i as f64 - 0.5) / scale)
}

/// `μ` values in `[0, 1]` at which the ω-index `μ ↦ i_ω(μ, e)` jumps.
///
/// The index is non-decreasing in `μ`; the `j`-th jump is located by
/// bisection on "at least `j` negative eigenvalues". Jumps closer than
/// `merge_tol` merge into one location. The jumps must add up to
/// `i_ω(1) - i_ω(0)`, which is 2 for `ω ≠ 1` and 0 for `ω = 1`.
pub fn find_degenerate_mus(
    e: f64,
    w: UnitCirclePoint,
    cfg: &CurveConfig,
) -> Result<Vec<DegenerateMu>> {
    find_degenerate_mus_warm(e, w, cfg, &[])
}

fn find_degenerate_mus_warm(
    e: f64,
    w: UnitCirclePoint,
    cfg: &CurveConfig,
    warm: &[Option<(f64, f64)>],
) -> Result<Vec<DegenerateMu>> {
    cfg.spectral.validate()?;
    let n = cfg.spectral.truncation;
    let count = |mu: f64| -> Result<usize> { negative_count(&ParameterPoint::new(mu, e)?, w, n) };
    // the endpoints carry a kernel (ν₁ = 2 at μ = 0, ν₁ = 3 at μ = 1), so
    // they are counted with the zero band rather than by sign
    let endpoint = |mu: f64| -> Result<usize> {
        Ok(
            morse_index_nullity(&ParameterPoint::new(mu, e)?, w, &cfg.spectral)?
                .pair
                .index,
        )
    };
    let start = endpoint(0.0)?;
    let end = endpoint(1.0)?;
    let expected = if w.is_one() { 0 } else { 2 };
    let total = end as i64 - start as i64;
    if total != expected {
        return Err(Error::TotalMultiplicityViolation {
            e,
            omega_angle: w.angle(),
            total,
        });
    }

    let levels = cfg.levels();
    let mut jumps: Vec<f64> = Vec::new();
    for (k, j) in (start + 1..=end).enumerate() {
        let pred = |mu: f64| -> Result<bool> { Ok(count(mu)? >= j) };
        let hint = warm.get(k).copied().flatten();
        jumps.push(locate(levels, 0.0, 1.0, hint, &pred)?);
    }

    let mut out: Vec<DegenerateMu> = Vec::new();
    for mu in jumps {
        match out.last_mut() {
            Some(last) if (mu - last.mu).abs() <= cfg.merge_tol => last.multiplicity += 1,
            _ => out.push(DegenerateMu {
                mu,
                multiplicity: 1,
            }),
        }
    }
    Ok(out)
}

/// Whether the monodromy spectrum touches the unit circle.
fn touches_circle(p: &ParameterPoint, cfg: &CurveConfig) -> Result<bool> {
    let m = integrate_monodromy(p, &cfg.integrator)?;
    Ok(eigenvalues_symplectic(&m)
        .iter()
        .any(|l| (l.norm() - 1.0).abs() <= cfg.classify_tol))
}

/// `μ_l(e)`: the end of the hyperbolic prefix of `μ ↦ γ_{μ,e}(2π)`.
pub fn hyperbolic_boundary(e: f64, cfg: &CurveConfig) -> Result<f64> {
    hyperbolic_boundary_warm(e, cfg, None)
}

fn hyperbolic_boundary_warm(e: f64, cfg: &CurveConfig, warm: Option<(f64, f64)>) -> Result<f64> {
    let pred = |mu: f64| touches_circle(&ParameterPoint::new(mu, e)?, cfg);
    let (lo, hi) = (cfg.delta, 1.0 - cfg.delta);
    if pred(lo)? || !pred(hi)? {
        return Err(Error::NoTransitionFound { e });
    }
    locate(cfg.levels(), lo, hi, warm, &pred)
}

/// Name of a separation curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CurveName {
    GammaL,
    GammaM,
    GammaR,
}

impl CurveName {
    pub const ALL: [CurveName; 3] = [CurveName::GammaL, CurveName::GammaM, CurveName::GammaR];

    pub fn as_str(&self) -> &'static str {
        match self {
            CurveName::GammaL => "gamma_l",
            CurveName::GammaM => "gamma_m",
            CurveName::GammaR => "gamma_r",
        }
    }
}

/// Samples `(e, μ)` of one curve, strictly increasing in `e`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveTrace {
    pub name: CurveName,
    pub samples: Vec<(f64, f64)>,
    /// Bisection cell width of every sample.
    pub tolerance: f64,
}

impl CurveTrace {
    pub fn mu_at(&self, e: f64) -> Option<f64> {
        self.samples.iter().find(|s| s.0 == e).map(|s| s.1)
    }
}

/// Output of [`trace_curves`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TracedCurves {
    pub gamma_l: CurveTrace,
    pub gamma_m: CurveTrace,
    pub gamma_r: CurveTrace,
    /// Eccentricities where `μ_l ≤ μ_m ≤ μ_r` fails beyond the tolerance.
    pub ordering_violations: Vec<f64>,
}

impl TracedCurves {
    pub fn curves(&self) -> [&CurveTrace; 3] {
        [&self.gamma_l, &self.gamma_m, &self.gamma_r]
    }
}

#[derive(Debug, Clone, Copy)]
struct CurvePoint {
    e: f64,
    mu_l: f64,
    mu_m: f64,
    mu_r: f64,
}

/// Bracket around the last value, a few times wider than the last step.
fn warm_bracket(prev: Option<(f64, f64)>) -> Option<(f64, f64)> {
    prev.map(|(before, last)| {
        let width = (3.0 * (last - before).abs()).max(1e-3);
        (last - width, last + width)
    })
}

fn trace_chunk(es: &[f64], cfg: &CurveConfig) -> Result<Vec<CurvePoint>> {
    let minus_one = UnitCirclePoint::minus_one();
    let mut out: Vec<CurvePoint> = Vec::with_capacity(es.len());
    for &e in es {
        let hist = |f: fn(&CurvePoint) -> f64| -> Option<(f64, f64)> {
            match out.len() {
                0 => None,
                1 => Some((f(&out[0]), f(&out[0]))),
                n => Some((f(&out[n - 2]), f(&out[n - 1]))),
            }
        };
        let wrap = |err: Error| Error::AtEccentricity {
            e,
            source: Box::new(err),
        };
        let mu_l =
            hyperbolic_boundary_warm(e, cfg, warm_bracket(hist(|p| p.mu_l))).map_err(wrap)?;
        let warm = [
            warm_bracket(hist(|p| p.mu_m)),
            warm_bracket(hist(|p| p.mu_r)),
        ];
        let degenerate = find_degenerate_mus_warm(e, minus_one, cfg, &warm).map_err(wrap)?;
        let (mu_m, mu_r) = match degenerate.as_slice() {
            [single] => (single.mu, single.mu),
            [first, .., last] => (first.mu, last.mu),
            [] => unreachable!("total multiplicity is checked to be 2"),
        };
        out.push(CurvePoint {
            e,
            mu_l,
            mu_m,
            mu_r,
        });
    }
    Ok(out)
}

/// `steps + 1` equally spaced values `k · max / steps`, ending exactly at
/// `max`; `steps = 0` gives `[0]`.
pub fn uniform_grid(max: f64, steps: usize) -> Vec<f64> {
    if steps == 0 {
        return vec![0.0];
    }
    (0..=steps)
        .map(|k| {
            if k == steps {
                max
            } else {
                max * k as f64 / steps as f64
            }
        })
        .collect()
}

/// Traces `Γ_l`, `Γ_m`, `Γ_r` over `e_grid`.
///
/// The grid is sorted and deduplicated. Contiguous chunks of it are
/// processed in parallel, each warm-starting its brackets from the previous
/// eccentricity; the dyadic bisection makes the result independent of the
/// chunking.
pub fn trace_curves(e_grid: &[f64], cfg: &CurveConfig) -> Result<TracedCurves> {
    let mut es: Vec<f64> = e_grid.to_vec();
    if es.is_empty() {
        return Err(Error::InvalidParameter {
            name: "e grid",
            value: 0.0,
            reason: "must contain at least one eccentricity",
        });
    }
    for &e in &es {
        if !(e.is_finite() && (0.0..=cfg.e_max).contains(&e)) {
            return Err(Error::InvalidParameter {
                name: "e",
                value: e,
                reason: "must lie in [0, e_max] for tracing",
            });
        }
    }
    es.sort_by(f64::total_cmp);
    es.dedup();

    let chunk = es
        .len()
        .div_ceil(rayon::current_num_threads().max(1))
        .max(1);
    let parts: Vec<Vec<CurvePoint>> = es
        .par_chunks(chunk)
        .map(|c| trace_chunk(c, cfg))
        .collect::<Result<_>>()?;
    let points: Vec<CurvePoint> = parts.into_iter().flatten().collect();

    let tol = cfg.bisection_tol;
    let ordering_violations = points
        .iter()
        .filter(|p| p.mu_l > p.mu_m + tol || p.mu_m > p.mu_r + tol)
        .map(|p| p.e)
        .collect();
    let trace = |name, f: fn(&CurvePoint) -> f64| CurveTrace {
        name,
        samples: points.iter().map(|p| (p.e, f(p))).collect(),
        tolerance: tol,
    };
    Ok(TracedCurves {
        gamma_l: trace(CurveName::GammaL, |p| p.mu_l),
        gamma_m: trace(CurveName::GammaM, |p| p.mu_m),
        gamma_r: trace(CurveName::GammaR, |p| p.mu_r),
        ordering_violations,
    })
}

/// Eccentricity window of the tangent fit.
pub const TANGENT_WINDOW: (f64, f64) = (0.002, 0.02);

/// Slope `dμ/de` of `Γ_m` or `Γ_r` at `(μ*, 0)`.
///
/// Fits `(μ(e) - μ*)/e = s + c e` by least squares over the samples with
/// `e` in [`TANGENT_WINDOW`] and returns the intercept `s`; the linear term
/// absorbs the curvature of the curve.
pub fn tangent_at_origin(curve: &CurveTrace) -> Result<f64> {
    if curve.name == CurveName::GammaL {
        return Err(Error::InvalidParameter {
            name: "curve",
            value: 0.0,
            reason: "tangents at the origin exist for gamma_m and gamma_r only",
        });
    }
    let ms = mu_star();
    let (lo, hi) = TANGENT_WINDOW;
    let pts: Vec<(f64, f64)> = curve
        .samples
        .iter()
        .filter(|(e, _)| *e >= lo - 1e-12 && *e <= hi + 1e-12)
        .map(|&(e, mu)| (e, (mu - ms) / e))
        .collect();
    const REQUIRED: usize = 3;
    if pts.len() < REQUIRED {
        return Err(Error::InsufficientSamples {
            found: pts.len(),
            required: REQUIRED,
        });
    }
    let n = pts.len() as f64;
    let mean_e = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_r = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_e).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_e) * (p.1 - mean_r)).sum();
    let c = sxy / sxx;
    Ok(mean_r - c * mean_e)
}
