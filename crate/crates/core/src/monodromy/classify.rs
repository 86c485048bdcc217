//! Stability classification of a symplectic 4×4 monodromy matrix.

use nalgebra::{Matrix2, Matrix4, Vector4, SVD};
use num_complex::Complex64;
use serde::Serialize;

use super::{cluster_radius, eigenvalues_symplectic, nullity_omega, SymplecticMatrix4};
use crate::model::{symplectic_j, UnitCirclePoint};

/// Default distance-to-circle and collision threshold.
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-6;

// Bound on the conditioning of the invariant-subspace split used for
// Jordan-chain normal-form hints.
const SPLIT_CONDITION_MAX: f64 = 1e6;

/// Best-effort Jordan structure at a degenerate point of the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "form")]
pub enum JordanHint {
    /// Geometric multiplicity equals the algebraic one (e.g. `-I₂`).
    Semisimple,
    /// `N₁(λ, a)` at `λ = ±1`, with the sign of `a`.
    N1 { a_sign: i8 },
    /// `N₂(e^{iθ}, b)`; trivial iff `(b₂ - b₃) sin θ > 0`.
    N2 { trivial: bool },
    /// The numerical structure could not be resolved.
    Unresolved,
}

/// A point `ω ∈ U` where the monodromy matrix is ω-degenerate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegeneratePoint {
    pub omega: UnitCirclePoint,
    /// Number of eigenvalues clustered at `ω`.
    pub multiplicity: usize,
    /// `ν_ω`, numerical rank deficiency of `M - ωI`.
    pub nullity: usize,
    pub hint: JordanHint,
    /// False when singular values of `M - ωI` sit close to the rank threshold.
    pub confident: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "tag")]
pub enum StabilityKind {
    HyperbolicHyperbolic,
    EllipticHyperbolic,
    EllipticElliptic { strong: bool },
    Degenerate { points: Vec<DegeneratePoint> },
}

/// Result of [`classify_stability`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityClass {
    pub kind: StabilityKind,
    pub eigenvalues: [Complex64; 4],
    /// Normal-form angles `θ ∈ (0, 2π)` of the non-degenerate elliptic pairs,
    /// i.e. `M ≈ R(θ) ⋄ …`.
    pub elliptic_angles: Vec<f64>,
}

impl StabilityClass {
    pub fn tag(&self) -> &'static str {
        match self.kind {
            StabilityKind::HyperbolicHyperbolic => "hyperbolic-hyperbolic",
            StabilityKind::EllipticHyperbolic => "elliptic-hyperbolic",
            StabilityKind::EllipticElliptic { .. } => "elliptic-elliptic",
            StabilityKind::Degenerate { .. } => "degenerate",
        }
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.kind == StabilityKind::HyperbolicHyperbolic
    }

    pub fn is_strongly_stable(&self) -> bool {
        self.kind == StabilityKind::EllipticElliptic { strong: true }
    }

    pub fn degenerate_points(&self) -> &[DegeneratePoint] {
        match &self.kind {
            StabilityKind::Degenerate { points } => points,
            _ => &[],
        }
    }
}

/// Classifies `M` by the position of its spectrum relative to `U`.
///
/// `±1` are checked first through the rank of `M ∓ I`. The remaining
/// eigenvalues are elliptic when within `tol` of the unit circle; two elliptic
/// pairs whose angles agree within `tol` form a collision, reported as
/// `EllipticElliptic { strong: false }` when semisimple and as a degenerate
/// point otherwise.
pub fn classify_stability(m: &SymplecticMatrix4, tol: f64) -> StabilityClass {
    let eigenvalues = eigenvalues_symplectic(m);
    let mut used = [false; 4];
    let mut points = Vec::new();
    let radius = cluster_radius(m, DEFAULT_CLASSIFY_TOL).max(tol);

    for omega in [UnitCirclePoint::one(), UnitCirclePoint::minus_one()] {
        let w = omega.to_complex();
        let (nullity, confident) = rank_deficiency(m, w, tol);
        let touching = eigenvalues.iter().any(|l| (l - w).norm() <= tol);
        if nullity == 0 && !touching {
            continue;
        }
        let cluster: Vec<usize> = (0..4)
            .filter(|&i| !used[i] && (eigenvalues[i] - w).norm() <= radius)
            .collect();
        for &i in &cluster {
            used[i] = true;
        }
        let multiplicity = cluster.len().max(nullity);
        let hint = if multiplicity == nullity {
            JordanHint::Semisimple
        } else if multiplicity == 2 && nullity == 1 {
            let pair = [
                eigenvalues[cluster[0]],
                eigenvalues[cluster[1 % cluster.len()]],
            ];
            chain_invariant(m, pair)
                .map(|q| JordanHint::N1 {
                    a_sign: if q.re < 0.0 { 1 } else { -1 },
                })
                .unwrap_or(JordanHint::Unresolved)
        } else {
            JordanHint::Unresolved
        };
        points.push(DegeneratePoint {
            omega,
            multiplicity,
            nullity,
            hint,
            confident,
        });
    }

    // eigenvalues in the open upper half plane on the circle, plus off-circle ones
    let on_circle = |l: &Complex64| (l.norm() - 1.0).abs() <= tol;
    let upper: Vec<usize> = (0..4)
        .filter(|&i| !used[i] && on_circle(&eigenvalues[i]) && eigenvalues[i].im > 0.0)
        .collect();
    let off_circle = (0..4)
        .filter(|&i| !used[i] && !on_circle(&eigenvalues[i]))
        .count();

    let mut elliptic_angles = Vec::new();
    let mut semisimple_collision = false;
    if upper.len() == 2 && (eigenvalues[upper[0]].arg() - eigenvalues[upper[1]].arg()).abs() <= tol
    {
        let pair = [eigenvalues[upper[0]], eigenvalues[upper[1]]];
        let mean = 0.5 * (pair[0] + pair[1]);
        let omega = UnitCirclePoint::from_complex(mean);
        let (nullity, confident) = rank_deficiency(m, omega.to_complex(), tol);
        if nullity >= 2 {
            semisimple_collision = true;
        } else {
            let hint = chain_invariant(m, pair)
                .map(|q| JordanHint::N2 {
                    trivial: (mean * q).re > 0.0,
                })
                .unwrap_or(JordanHint::Unresolved);
            for omega in [omega, UnitCirclePoint::from_complex(mean.conj())] {
                points.push(DegeneratePoint {
                    omega,
                    multiplicity: 2,
                    nullity,
                    hint,
                    confident,
                });
            }
        }
    } else {
        elliptic_angles = upper
            .iter()
            .map(|&i| normal_form_angle(m, eigenvalues[i]))
            .collect();
    }

    let kind = if !points.is_empty() {
        points.sort_by(|a, b| a.omega.angle().total_cmp(&b.omega.angle()));
        StabilityKind::Degenerate { points }
    } else if semisimple_collision {
        StabilityKind::EllipticElliptic { strong: false }
    } else {
        match (upper.len(), off_circle) {
            (0, _) => StabilityKind::HyperbolicHyperbolic,
            (1, 2) => StabilityKind::EllipticHyperbolic,
            (2, 0) => StabilityKind::EllipticElliptic { strong: true },
            // spectrum inconsistent with Sp(4) at this tolerance
            _ => StabilityKind::Degenerate { points: Vec::new() },
        }
    };

    StabilityClass {
        kind,
        eigenvalues,
        elliptic_angles,
    }
}

fn complex4(m: &SymplecticMatrix4) -> Matrix4<Complex64> {
    m.entries().map(|x| Complex64::new(x, 0.0))
}

fn complex_j() -> Matrix4<Complex64> {
    symplectic_j().map(|x| Complex64::new(x, 0.0))
}

/// `ν_ω` and whether no singular value falls within a decade of the threshold.
fn rank_deficiency(m: &SymplecticMatrix4, w: Complex64, tol: f64) -> (usize, bool) {
    let threshold = tol * m.norm();
    let sv = super::shifted_singular_values(m, w);
    let nullity = nullity_omega(m, UnitCirclePoint::from_complex(w), tol);
    let confident = sv
        .iter()
        .all(|&s| s < 0.1 * threshold || s > 10.0 * threshold);
    (nullity, confident)
}

/// Angle `θ` of the normal form `R(θ)` carried by the elliptic eigenvalue
/// `λ = e^{iφ}`, `φ ∈ (0, π)`.
///
/// For `R(θ)` the eigenvector `v` of `e^{iθ}` has `Im(v* J v) > 0`, so the
/// sign of this quantity decides between `φ` and `2π - φ`.
fn normal_form_angle(m: &SymplecticMatrix4, lambda: Complex64) -> f64 {
    let phi = lambda.arg();
    let shifted = complex4(m) - Matrix4::identity() * lambda;
    let svd = SVD::new(shifted, false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let v: Vector4<Complex64> = v_t.row(3).adjoint();
    let form = (v.adjoint() * complex_j() * v)[(0, 0)];
    if form.im > 0.0 {
        phi
    } else {
        2.0 * std::f64::consts::PI - phi
    }
}

/// `v* J w` for a Jordan chain `(M - λ)w = v` inside the invariant subspace
/// of an eigenvalue pair that numerically represents a 2×2 Jordan block.
///
/// `v* J v = 0` on such a chain, so the value is independent of the choice
/// of `w` and changes only by a positive factor under rescaling. Returns
/// `None` when the subspace split is ill-conditioned or the block is
/// numerically semisimple.
fn chain_invariant(m: &SymplecticMatrix4, pair: [Complex64; 2]) -> Option<Complex64> {
    let mc = complex4(m);
    let id = Matrix4::<Complex64>::identity();
    let product = (mc - id * pair[0]) * (mc - id * pair[1]);
    let svd = SVD::new(product, false, true);
    let sv = svd.singular_values;
    if sv[0] == 0.0 || sv[0] / sv[1] > SPLIT_CONDITION_MAX {
        return None;
    }
    let v_t = svd.v_t?;
    // orthonormal basis of the two-dimensional invariant subspace
    let u = v_t.fixed_rows::<2>(2).adjoint();
    let t: Matrix2<Complex64> = u.adjoint() * mc * u;
    let lambda = 0.5 * t.trace();
    let n = t - Matrix2::identity() * lambda;
    if n.norm() <= 1e-4 * m.norm() {
        return None;
    }
    let j = if n.column(0).norm() >= n.column(1).norm() {
        0
    } else {
        1
    };
    let w = u.column(j).into_owned();
    let v = u * n.column(j);
    Some((v.adjoint() * complex_j() * w)[(0, 0)])
}
