//! Self-verification suite.
//!
//! Each check reproduces one analytic statement about the model with an
//! independent numerical path and reports whether it holds within a fixed
//! tolerance and time budget.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::curves::{
    find_degenerate_mus, hyperbolic_boundary, tangent_at_origin, trace_curves, uniform_grid,
    CurveConfig,
};
use crate::error::Result;
use crate::model::{ParameterPoint, UnitCirclePoint};
use crate::monodromy::{
    classify_stability, e_zero_oracle, eigenvalues_symplectic, integrate_monodromy,
    integrate_rotated_monodromy, nullity_omega, StabilityKind, SymplecticMatrix4,
    DEFAULT_KERNEL_TOL,
};
use crate::spectral::{
    assemble_operator, e_zero_block_oracle, galerkin_aligned_spectrum, morse_index_nullity,
    mu_star, perturbation_pairing, IndexPair, PairingDirection,
};

/// Number of checks in the suite.
pub const CHECK_COUNT: usize = 12;

/// Settings of the suite. Loosening the integrator tolerance is the
/// intended way to see checks fail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub curves: CurveConfig,
    /// Seed of the random samples of checks 10 and 12.
    pub seed: u64,
    pub nullity_samples: usize,
    pub rotated_samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            curves: CurveConfig::default(),
            seed: 20_240_917,
            nullity_samples: 200,
            rotated_samples: 20,
        }
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_secs: f64,
    /// Time budget; exceeding it fails the check.
    pub budget_secs: Option<f64>,
}

impl CheckOutcome {
    /// `PASS`/`FAIL` line for human-readable reports.
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2}] {}: {} ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed_secs
        )
    }
}

/// Full report of [`run_all`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
    pub elapsed_secs: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_ids(&self) -> Vec<usize> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.id)
            .collect()
    }
}

/// Name and time budget of check `id` (1-based).
pub fn check_info(id: usize) -> Option<(&'static str, Option<f64>)> {
    let info = match id {
        1 => ("mu* recovery", Some(5.0)),
        2 => ("e=0 eigenvalue match", Some(10.0)),
        3 => ("index tables", Some(20.0)),
        4 => ("tangent slopes", Some(30.0)),
        5 => ("hyperbolic boundary at e=0", Some(5.0)),
        6 => ("oracle equivalence", Some(10.0)),
        7 => ("perturbation pairings", None),
        8 => ("total -1 multiplicity", None),
        9 => ("index monotonicity", None),
        10 => ("cross-method nullity", None),
        11 => ("segment classification", None),
        12 => ("symplecticity", None),
        _ => return None,
    };
    Some(info)
}

/// Runs check `id`; `None` for an unknown id. Numerical errors inside a
/// check make it fail with the error as detail.
pub fn run_check(id: usize, cfg: &VerifyConfig) -> Option<CheckOutcome> {
    let (name, budget) = check_info(id)?;
    let start = Instant::now();
    let result = match id {
        1 => check_mu_star(cfg),
        2 => check_eigenvalue_match(cfg),
        3 => check_index_tables(cfg),
        4 => check_tangent_slopes(cfg),
        5 => check_hyperbolic_boundary(cfg),
        6 => check_oracle_equivalence(cfg),
        7 => check_pairings(),
        8 => check_total_multiplicity(cfg),
        9 => check_monotonicity(cfg),
        10 => check_cross_nullity(cfg),
        11 => check_segments(cfg),
        12 => check_symplecticity(cfg),
        _ => unreachable!(),
    };
    let elapsed_secs = start.elapsed().as_secs_f64();
    let (mut passed, mut detail) = match result {
        Ok(v) => v,
        Err(err) => (false, format!("error: {err}")),
    };
    if let Some(limit) = budget {
        if elapsed_secs >= limit {
            passed = false;
            detail.push_str(&format!("; over the {limit} s budget"));
        }
    }
    Some(CheckOutcome {
        id,
        name,
        passed,
        detail,
        elapsed_secs,
        budget_secs: budget,
    })
}

/// Runs the checks in `ids` in order (all checks when empty).
pub fn run_all(ids: &[usize], cfg: &VerifyConfig) -> VerifyReport {
    let start = Instant::now();
    let all: Vec<usize> = (1..=CHECK_COUNT).collect();
    let ids = if ids.is_empty() { &all[..] } else { ids };
    let checks = ids.iter().filter_map(|&id| run_check(id, cfg)).collect();
    VerifyReport {
        checks,
        elapsed_secs: start.elapsed().as_secs_f64(),
    }
}

type Check = Result<(bool, String)>;

fn monodromy(mu: f64, e: f64, cfg: &VerifyConfig) -> Result<SymplecticMatrix4> {
    integrate_monodromy(&ParameterPoint::new(mu, e)?, &cfg.curves.integrator)
}

fn index(mu: f64, e: f64, w: UnitCirclePoint, cfg: &VerifyConfig) -> Result<IndexPair> {
    Ok(morse_index_nullity(&ParameterPoint::new(mu, e)?, w, &cfg.curves.spectral)?.pair)
}

/// Smallest over all pairings of the largest distance between the sets.
fn matching_distance(a: &[Complex64; 4], b: &[Complex64; 4]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..4 {
        for j in (0..4).filter(|&j| j != i) {
            for k in (0..4).filter(|&k| k != i && k != j) {
                let l = 6 - i - j - k;
                let d = [(0, i), (1, j), (2, k), (3, l)]
                    .iter()
                    .map(|&(x, y)| (a[x] - b[y]).norm())
                    .fold(0.0, f64::max);
                best = best.min(d);
            }
        }
    }
    best
}

fn check_mu_star(cfg: &VerifyConfig) -> Check {
    let found = find_degenerate_mus(0.0, UnitCirclePoint::minus_one(), &cfg.curves)?;
    let hit = found
        .iter()
        .find(|d| d.multiplicity == 2 && (d.mu - mu_star()).abs() <= 1e-6);
    let detail = found
        .iter()
        .map(|d| format!("mu {:.10} (x{})", d.mu, d.multiplicity))
        .collect::<Vec<_>>()
        .join(", ");
    Ok((
        hit.is_some(),
        format!("{detail}; expected {:.10} (x2)", mu_star()),
    ))
}

fn check_eigenvalue_match(cfg: &VerifyConfig) -> Check {
    let mus: Vec<f64> = (0..50).map(|k| (k as f64 + 0.5) / 50.0).collect();
    let errors = mus
        .par_iter()
        .map(|&mu| -> Result<f64> {
            let m = monodromy(mu, 0.0, cfg)?;
            Ok(matching_distance(
                &eigenvalues_symplectic(&m),
                &e_zero_oracle(mu)?.eigenvalues,
            ))
        })
        .collect::<Result<Vec<f64>>>()?;
    let (worst, at) =
        errors.iter().zip(&mus).fold(
            (0.0, 0.0),
            |acc, (&d, &mu)| if d > acc.0 { (d, mu) } else { acc },
        );
    Ok((
        worst <= 1e-8,
        format!("max mismatch {worst:.2e} at mu {at:.2} over 50 values (tol 1e-8)"),
    ))
}

fn check_index_tables(cfg: &VerifyConfig) -> Check {
    let one = UnitCirclePoint::one();
    let minus = UnitCirclePoint::minus_one();
    let mut cases = Vec::new();
    for e in [0.0, 0.3, 0.6] {
        for (mu, expected) in [(0.0, (0, 2)), (0.5, (0, 0)), (1.0, (0, 3))] {
            cases.push((mu, e, one, expected));
        }
    }
    for (mu, expected) in [(0.5, (0, 0)), (mu_star(), (0, 2)), (0.95, (2, 0))] {
        cases.push((mu, 0.0, minus, expected));
    }
    let got = cases
        .par_iter()
        .map(|&(mu, e, w, _)| index(mu, e, w, cfg))
        .collect::<Result<Vec<_>>>()?;
    let bad: Vec<String> = cases
        .iter()
        .zip(&got)
        .filter(|((.., (i, n)), p)| (p.index, p.nullity) != (*i, *n))
        .map(|((mu, e, w, exp), p)| {
            format!(
                "(mu {mu:.4}, e {e}, angle {:.4}): ({}, {}) != {exp:?}",
                w.angle(),
                p.index,
                p.nullity
            )
        })
        .collect();
    if bad.is_empty() {
        Ok((true, format!("{} table entries reproduced", cases.len())))
    } else {
        Ok((false, bad.join("; ")))
    }
}

fn check_tangent_slopes(cfg: &VerifyConfig) -> Check {
    let traced = trace_curves(&uniform_grid(0.02, 10), &cfg.curves)?;
    let slope = (291.0 + 15.0 * 97f64.sqrt()) / 3104.0;
    let m = tangent_at_origin(&traced.gamma_m)?;
    let r = tangent_at_origin(&traced.gamma_r)?;
    let rel = |got: f64, want: f64| (got - want).abs() / want.abs();
    let (em, er) = (rel(m, -slope), rel(r, slope));
    Ok((
        em <= 0.02 && er <= 0.02,
        format!(
            "gamma_m {m:.6} ({:.2}%), gamma_r {r:.6} ({:.2}%), expected -/+{slope:.7} within 2%",
            100.0 * em,
            100.0 * er
        ),
    ))
}

fn check_hyperbolic_boundary(cfg: &VerifyConfig) -> Check {
    let l = hyperbolic_boundary(0.0, &cfg.curves)?;
    let err = (l - 8.0 / 9.0).abs();
    Ok((
        err <= 1e-6,
        format!("mu_l(0) = {l:.10}, |mu_l - 8/9| = {err:.1e} (tol 1e-6)"),
    ))
}

fn check_oracle_equivalence(cfg: &VerifyConfig) -> Check {
    let n = cfg.curves.spectral.truncation;
    let cases: Vec<(f64, i32)> = (0..20)
        .flat_map(|k| [(k as f64 / 19.0, 1), (k as f64 / 19.0, -1)])
        .collect();
    let results = cases
        .par_iter()
        .map(|&(mu, sign)| -> Result<(bool, f64)> {
            let w = if sign == 1 {
                UnitCirclePoint::one()
            } else {
                UnitCirclePoint::minus_one()
            };
            let pair_ok = index(mu, 0.0, w, cfg)? == e_zero_block_oracle(mu, sign, n)?.pair;
            let ev = assemble_operator(&ParameterPoint::new(mu, 0.0)?, w, n)?.eigenvalues()?;
            let blocks = galerkin_aligned_spectrum(mu, sign, n)?;
            let err = ev
                .iter()
                .zip(&blocks)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            Ok((pair_ok, err))
        })
        .collect::<Result<Vec<_>>>()?;
    let mismatched = results.iter().filter(|r| !r.0).count();
    let worst = results.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok((
        mismatched == 0 && worst <= 1e-10,
        format!("{mismatched} index mismatches over 40 cases; max eigenvalue error {worst:.1e} (tol 1e-10)"),
    ))
}

fn check_pairings() -> Check {
    let s = 97f64.sqrt();
    let want_mu = PI * (97.0 - 15.0 * s) / 64.0;
    let want_e = PI * (-33.0 + 15.0 * s) / 1024.0;
    let got_mu = perturbation_pairing(PairingDirection::Mu);
    let got_e = perturbation_pairing(PairingDirection::E);
    let err = (got_mu - want_mu).abs().max((got_e - want_e).abs());
    Ok((
        err <= 1e-6,
        format!("mu pairing {got_mu:.9}, e pairing {got_e:.9}; max error {err:.1e} (tol 1e-6)"),
    ))
}

fn check_total_multiplicity(cfg: &VerifyConfig) -> Check {
    let minus = UnitCirclePoint::minus_one();
    let mut parts = Vec::new();
    let mut ok = true;
    for e in [0.0, 0.2, 0.5, 0.8] {
        let found = find_degenerate_mus(e, minus, &cfg.curves)?;
        let mut total = 0;
        for d in &found {
            let spectral = index(d.mu, e, minus, cfg)?.nullity;
            let m = monodromy(d.mu, e, cfg)?;
            let direct = nullity_omega(&m, minus, DEFAULT_KERNEL_TOL);
            ok &= spectral == direct;
            total += spectral;
        }
        ok &= total == 2;
        parts.push(format!("e {e}: {total} at {} location(s)", found.len()));
    }
    Ok((ok, parts.join(", ")))
}

fn check_monotonicity(cfg: &VerifyConfig) -> Check {
    let mus = uniform_grid(1.0, 99);
    let jobs: Vec<(f64, usize)> = [0.0, 0.25, 0.5]
        .iter()
        .flat_map(|&e| (0..8).map(move |k| (e, k)))
        .collect();
    let failures = jobs
        .par_iter()
        .map(|&(e, k)| -> Result<Option<String>> {
            let w = UnitCirclePoint::new(2.0 * PI * k as f64 / 8.0);
            let seq = mus
                .iter()
                .map(|&mu| index(mu, e, w, cfg).map(|p| p.index))
                .collect::<Result<Vec<usize>>>()?;
            let monotone = seq.windows(2).all(|s| s[0] <= s[1]);
            let end_ok = if k == 0 {
                seq.iter().all(|&i| i == 0)
            } else {
                seq[99] == 2
            };
            Ok((!monotone || !end_ok).then(|| format!("e {e} angle {:.3}: {seq:?}", w.angle())))
        })
        .collect::<Result<Vec<_>>>()?;
    let failures: Vec<String> = failures.into_iter().flatten().collect();
    if failures.is_empty() {
        Ok((
            true,
            "24 index sequences of 100 mu values non-decreasing with correct ends".into(),
        ))
    } else {
        Ok((false, failures.join("; ")))
    }
}

fn check_cross_nullity(cfg: &VerifyConfig) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let samples: Vec<(f64, f64, f64)> = (0..cfg.nullity_samples)
        .map(|_| {
            (
                rng.random_range(0.0..=1.0),
                rng.random_range(0.0..0.9),
                rng.random_range(0.0..2.0 * PI),
            )
        })
        .collect();
    let random = samples
        .par_iter()
        .map(|&(mu, e, angle)| -> Result<(usize, usize)> {
            let w = UnitCirclePoint::new(angle);
            let spectral = index(mu, e, w, cfg)?.nullity;
            let direct = nullity_omega(&monodromy(mu, e, cfg)?, w, DEFAULT_KERNEL_TOL);
            Ok((spectral, direct))
        })
        .collect::<Result<Vec<_>>>()?;
    let random_bad = random.iter().filter(|(s, d)| *s != 0 || *d != 0).count();

    let minus = UnitCirclePoint::minus_one();
    let mut curve_points = Vec::new();
    for e in [0.1, 0.4, 0.7] {
        for d in find_degenerate_mus(e, minus, &cfg.curves)? {
            curve_points.push((d.mu, e));
        }
    }
    let mut curve_bad = 0;
    for &(mu, e) in &curve_points {
        let spectral = index(mu, e, minus, cfg)?.nullity;
        let direct = nullity_omega(&monodromy(mu, e, cfg)?, minus, DEFAULT_KERNEL_TOL);
        if spectral == 0 || direct == 0 || spectral != direct {
            curve_bad += 1;
        }
    }
    Ok((
        random_bad == 0 && curve_bad == 0,
        format!(
            "{random_bad}/{} random samples with nonzero or disagreeing nullity; {curve_bad}/{} curve points without a common kernel",
            samples.len(),
            curve_points.len()
        ),
    ))
}

fn check_segments(cfg: &VerifyConfig) -> Check {
    let minus = UnitCirclePoint::minus_one();
    let mut ok = true;
    let mut parts = Vec::new();
    for e in [0.1, 0.3, 0.5] {
        let l = hyperbolic_boundary(e, &cfg.curves)?;
        let found = find_degenerate_mus(e, minus, &cfg.curves)?;
        let (m, r) = (found[0].mu, found[found.len() - 1].mu);
        let tags = [
            (0.5 * (l + m), "strong"),
            (0.5 * (m + r), "elliptic-hyperbolic"),
            (0.5 * (r + 1.0), "strong"),
        ]
        .iter()
        .map(|&(mu, want)| -> Result<(bool, String)> {
            let class = classify_stability(&monodromy(mu, e, cfg)?, cfg.curves.classify_tol);
            let good = match want {
                "strong" => class.is_strongly_stable(),
                _ => class.kind == StabilityKind::EllipticHyperbolic,
            };
            Ok((good, class.tag().to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
        let seg_ok = tags.iter().all(|t| t.0);
        ok &= seg_ok;
        let mut part = format!(
            "e {e}: [{}]",
            tags.iter()
                .map(|t| t.1.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        );
        if m - l <= cfg.curves.bisection_tol {
            part.push_str(&format!(" (mu_l = mu_m = {l:.10}, first segment empty)"));
        }
        parts.push(part);
    }
    Ok((ok, parts.join("; ")))
}

fn check_symplecticity(cfg: &VerifyConfig) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let points: Vec<(f64, f64)> = (0..cfg.rotated_samples)
        .map(|_| (rng.random_range(0.0..=1.0), rng.random_range(0.0..=0.95)))
        .collect();
    let results = points
        .par_iter()
        .map(|&(mu, e)| -> Result<(f64, f64)> {
            let p = ParameterPoint::new(mu, e)?;
            let m = integrate_monodromy(&p, &cfg.curves.integrator)?;
            let xi = integrate_rotated_monodromy(&p, &cfg.curves.integrator)?;
            let scale = m.entries().amax().max(1.0);
            let diff = (m.entries() - xi.entries()).amax() / scale;
            Ok((m.symplectic_residual().max(xi.symplectic_residual()), diff))
        })
        .collect::<Result<Vec<_>>>()?;
    let residual = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let diff = results.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok((
        residual <= 1e-9 && diff <= 1e-8,
        format!("max residual {residual:.1e} (tol 1e-9), max |xi - gamma| / max(1, |gamma|) {diff:.1e} (tol 1e-8) at {} points", points.len()),
    ))
}
