//! Monodromy matrix of the linearised flow and its spectral data.
//!
//! The fundamental solution `γ(t)` of `γ' = J B(t) γ`, `γ(0) = I₄`, is
//! integrated over one period and `γ(2π)` is analysed on the unit circle:
//! ω-nullities, the degeneracy scalar `D_ω`, and a normal-form based
//! stability classification.

mod classify;
mod oracle;

use std::f64::consts::PI;

use nalgebra::{Matrix4, SVD};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrator;
use crate::model::{coefficient_matrix_b, second_order_potential, symplectic_j, ParameterPoint};

pub use crate::model::UnitCirclePoint;
pub use classify::{
    classify_stability, DegeneratePoint, JordanHint, StabilityClass, StabilityKind,
    DEFAULT_CLASSIFY_TOL,
};
pub use oracle::{e_zero_oracle, expm, EZeroOracle};

/// Default relative singular-value threshold of [`nullity_omega`].
pub const DEFAULT_KERNEL_TOL: f64 = 1e-6;

/// Step-doubling controls for the monodromy integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorConfig {
    /// Bound on the Richardson error estimate, relative to `max(1, ‖γ‖)`.
    pub tolerance: f64,
    pub min_steps: usize,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            min_steps: 4,
            max_steps: 1 << 14,
        }
    }
}

impl IntegratorConfig {
    /// Accepted symplectic residual; ten times the error tolerance.
    pub fn residual_bound(&self) -> f64 {
        10.0 * self.tolerance
    }
}

/// A real 4×4 matrix together with its distance from `Sp(4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticMatrix4 {
    entries: Matrix4<f64>,
    symplectic_residual: f64,
    steps: usize,
}

impl SymplecticMatrix4 {
    pub fn new(entries: Matrix4<f64>) -> Self {
        let j = symplectic_j();
        let scale = entries.amax().max(1.0);
        let symplectic_residual = (entries.transpose() * j * entries - j).amax() / (scale * scale);
        Self {
            entries,
            symplectic_residual,
            steps: 0,
        }
    }

    pub fn identity() -> Self {
        Self::new(Matrix4::identity())
    }

    pub fn entries(&self) -> &Matrix4<f64> {
        &self.entries
    }

    /// Max-norm of `MᵀJM - J`, relative to `max(1, ‖M‖_max)²`.
    ///
    /// Rounding alone leaves an absolute residual of order `ε‖M‖²`, which
    /// for strongly hyperbolic monodromies far exceeds any fixed bound.
    pub fn symplectic_residual(&self) -> f64 {
        self.symplectic_residual
    }

    /// Number of integrator steps that produced the matrix (0 if built directly).
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn determinant(&self) -> f64 {
        self.entries.determinant()
    }

    /// Spectral norm `‖M‖₂`.
    pub fn norm(&self) -> f64 {
        self.entries.svd(false, false).singular_values[0]
    }

    fn complex(&self) -> Matrix4<Complex64> {
        self.entries.map(|x| Complex64::new(x, 0.0))
    }
}

/// `γ_{μ,e}(2π)` for the original system `γ' = J B(t) γ`.
pub fn integrate_monodromy(
    p: &ParameterPoint,
    cfg: &IntegratorConfig,
) -> Result<SymplecticMatrix4> {
    let j = symplectic_j();
    let p = *p;
    refine(&move |t| j * coefficient_matrix_b(t, &p), cfg)
}

/// `ξ_{μ,e}(2π)` for the rotated system
/// `ξ' = J diag(I₂, R(I₂ - Q)Rᵀ) ξ`; equals [`integrate_monodromy`] since
/// the rotation is the identity at both ends of the period.
pub fn integrate_rotated_monodromy(
    p: &ParameterPoint,
    cfg: &IntegratorConfig,
) -> Result<SymplecticMatrix4> {
    let j = symplectic_j();
    let p = *p;
    refine(
        &move |t| {
            let mut h = Matrix4::zeros();
            h[(0, 0)] = 1.0;
            h[(1, 1)] = 1.0;
            // R(I - Q)Rᵀ = -(potential of the second order operator)
            let v = -second_order_potential(t, &p);
            h.fixed_view_mut::<2, 2>(2, 2).copy_from(&v);
            j * h
        },
        cfg,
    )
}

fn refine<F>(f: &F, cfg: &IntegratorConfig) -> Result<SymplecticMatrix4>
where
    F: Fn(f64) -> Matrix4<f64>,
{
    let mut steps = cfg.min_steps.max(1);
    let mut coarse = integrator::integrate(f, Matrix4::identity(), 0.0, 2.0 * PI, steps);
    loop {
        let fine_steps = steps * 2;
        let fine = integrator::integrate(f, Matrix4::identity(), 0.0, 2.0 * PI, fine_steps);
        let estimate = (fine - coarse).amax() / fine.amax().max(1.0);
        let mut m = SymplecticMatrix4::new(fine);
        m.steps = fine_steps;
        if estimate <= cfg.tolerance && m.symplectic_residual <= cfg.residual_bound() {
            return Ok(m);
        }
        if fine_steps * 2 > cfg.max_steps {
            return Err(Error::ToleranceNotMet {
                steps: fine_steps,
                error_estimate: estimate,
                residual: m.symplectic_residual,
            });
        }
        coarse = fine;
        steps = fine_steps;
    }
}

/// Eigenvalues of a symplectic 4×4 matrix.
///
/// The characteristic polynomial of `M ∈ Sp(4)` is palindromic,
/// `λ⁴ - aλ³ + bλ² - aλ + 1`, so `ρ = λ + 1/λ` solves
/// `ρ² - aρ + (b - 2) = 0`. Each `ρ` then yields a pair `{λ, 1/λ}`, and
/// conjugate closure is imposed when the `ρ` are complex or the pair lies
/// on the unit circle. Output order is `[λ₁, λ₁', λ₂, λ₂']` with each
/// consecutive pair sharing one `ρ`.
pub fn eigenvalues_symplectic(m: &SymplecticMatrix4) -> [Complex64; 4] {
    let e = m.entries();
    let a = e.trace();
    let b = 0.5 * (a * a - (e * e).trace());
    let disc = a * a - 4.0 * b + 8.0;

    if disc >= 0.0 {
        let sq = disc.sqrt();
        // numerically stable pair of roots
        let r1 = 0.5 * (a + a.signum().max(0.0).mul_add(2.0, -1.0) * sq);
        let r2 = if r1 != 0.0 {
            (b - 2.0) / r1
        } else {
            0.5 * (a - sq)
        };
        let [l1, l2] = pair_from_real_rho(r1);
        let [l3, l4] = pair_from_real_rho(r2);
        [l1, l2, l3, l4]
    } else {
        let rho = Complex64::new(0.5 * a, 0.5 * (-disc).sqrt());
        let s = (rho * rho - 4.0).sqrt();
        let (p, q) = (rho + s, rho - s);
        let big = if p.norm() >= q.norm() { p } else { q } * 0.5;
        let small = big.inv();
        [big, small, big.conj(), small.conj()]
    }
}

fn pair_from_real_rho(rho: f64) -> [Complex64; 2] {
    let d = rho * rho - 4.0;
    if d >= 0.0 {
        let big = 0.5 * (rho + rho.signum() * d.sqrt());
        let big = if big == 0.0 { 1.0 } else { big };
        [Complex64::new(big, 0.0), Complex64::new(1.0 / big, 0.0)]
    } else {
        let l = Complex64::new(0.5 * rho, 0.5 * (-d).sqrt());
        [l, l.conj()]
    }
}

/// Singular values of `M - ωI`, sorted descending.
pub(crate) fn shifted_singular_values(m: &SymplecticMatrix4, w: Complex64) -> [f64; 4] {
    let shifted = m.complex() - Matrix4::identity() * w;
    let sv = SVD::new(shifted, false, false).singular_values;
    [sv[0], sv[1], sv[2], sv[3]]
}

/// `ν_ω(M) = dim_C ker(M - ωI)`.
///
/// Counts singular values of `M - ωI` below `tol · ‖M‖₂`, capped by the
/// number of eigenvalues within [`cluster_radius`] of `ω`. The cap matters
/// for strongly hyperbolic, far from normal matrices, where `M - ωI` can
/// have singular values of order `1/‖M‖` without any eigenvalue near `ω`.
pub fn nullity_omega(m: &SymplecticMatrix4, w: UnitCirclePoint, tol: f64) -> usize {
    let threshold = tol * m.norm();
    let omega = w.to_complex();
    let rank_deficiency = shifted_singular_values(m, omega)
        .iter()
        .filter(|&&s| s <= threshold)
        .count();
    let radius = cluster_radius(m, tol);
    let clustered = eigenvalues_symplectic(m)
        .iter()
        .filter(|l| (*l - omega).norm() <= radius)
        .count();
    rank_deficiency.min(clustered)
}

/// Distance within which eigenvalues are grouped at a degenerate point.
///
/// Rounding splits a defective eigenvalue of `M` into a cluster whose
/// width grows like `‖M‖^{1/4}` for the matrices met here (about `4e-3`
/// at `‖M‖ = 10⁵`), so the `√tol` radius is widened accordingly.
pub(crate) fn cluster_radius(m: &SymplecticMatrix4, tol: f64) -> f64 {
    tol.sqrt().max(tol) * m.norm().max(1.0).powf(0.25)
}

/// `D_ω(M) = -ω̄² det(M - ωI₄)`, real for symplectic `M`.
pub fn degeneracy_scalar(m: &SymplecticMatrix4, w: UnitCirclePoint) -> Result<f64> {
    let omega = w.to_complex();
    let det = (m.complex() - Matrix4::identity() * omega).determinant();
    let d = -(omega.conj() * omega.conj()) * det;
    let scale = (1.0 + m.norm()).powi(4);
    if d.im.abs() > 1e-8 * scale {
        return Err(Error::NonRealResult { imaginary: d.im });
    }
    Ok(d.re)
}

#[cfg(test)]
mod tests;
