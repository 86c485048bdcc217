//! The `-1` kernel of `A(μ*, 0)` and first-order perturbation pairings.
//!
//! At `μ* = (5 + √97)/16`, `e = 0`, the kernel on the antiperiodic
//! boundary condition is spanned by
//! `x₀(t) = R(t)(ã₀ sin(t/2), cos(t/2))` and
//! `x₁(t) = R(t)(ã₀ cos(t/2), -sin(t/2))`, `ã₀ = 5/4 - μ*`.
//! Pairing `∂A/∂μ` and `∂A/∂e` against a kernel function gives the slope of
//! the degenerate curve it generates.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use serde::Serialize;

use crate::model::{rotation, s_matrix};

// trapezoid points; the integrands are trigonometric polynomials of degree 4
const QUADRATURE_POINTS: usize = 64;

/// `μ* = (5 + √97)/16`, where both `-1`-degenerate curves leave `e = 0`.
pub fn mu_star() -> f64 {
    (5.0 + 97f64.sqrt()) / 16.0
}

/// `ã₀ = (15 - √97)/16`.
pub fn a_tilde() -> f64 {
    (15.0 - 97f64.sqrt()) / 16.0
}

/// One of the two kernel functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFunction {
    X0,
    X1,
}

/// Samplers for the `-1` kernel of `A(μ*, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelBasis {
    pub a0: f64,
}

pub fn kernel_basis_minus_one() -> KernelBasis {
    KernelBasis { a0: a_tilde() }
}

impl KernelBasis {
    pub fn x0(&self, t: f64) -> [f64; 2] {
        let (s, c) = (0.5 * t).sin_cos();
        let v = rotation(t) * Vector2::new(self.a0 * s, c);
        [v.x, v.y]
    }

    pub fn x1(&self, t: f64) -> [f64; 2] {
        let (s, c) = (0.5 * t).sin_cos();
        let v = rotation(t) * Vector2::new(self.a0 * c, -s);
        [v.x, v.y]
    }

    pub fn eval(&self, which: KernelFunction, t: f64) -> [f64; 2] {
        match which {
            KernelFunction::X0 => self.x0(t),
            KernelFunction::X1 => self.x1(t),
        }
    }
}

/// Parameter direction of a perturbation of `A(μ, e)` at `(μ*, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairingDirection {
    Mu,
    E,
}

/// `∂A/∂μ` or `∂A/∂e` at `(μ*, 0)` as a multiplication operator.
fn derivative(direction: PairingDirection, t: f64) -> Matrix2<f64> {
    let id = Matrix2::identity();
    match direction {
        PairingDirection::Mu => (id + s_matrix(t) * 3.0) * 0.5,
        // ∂/∂e of 1/(1 + e cos t) at e = 0 is -cos t
        PairingDirection::E => {
            let mu = mu_star();
            (id * (2.0 + mu) + s_matrix(t) * (3.0 * mu)) * (-0.5 * t.cos())
        }
    }
}

/// `∫₀^{2π} ⟨(∂A/∂direction)(t) f(t), g(t)⟩ dt`.
pub fn pairing_between(direction: PairingDirection, f: KernelFunction, g: KernelFunction) -> f64 {
    let basis = kernel_basis_minus_one();
    let h = 2.0 * PI / QUADRATURE_POINTS as f64;
    (0..QUADRATURE_POINTS)
        .map(|i| {
            let t = i as f64 * h;
            let x = Vector2::from(basis.eval(f, t));
            let y = Vector2::from(basis.eval(g, t));
            y.dot(&(derivative(direction, t) * x))
        })
        .sum::<f64>()
        * h
}

/// `⟨(∂A/∂direction)(μ*, 0) x₀, x₀⟩`.
pub fn perturbation_pairing(direction: PairingDirection) -> f64 {
    pairing_between(direction, KernelFunction::X0, KernelFunction::X0)
}

/// First-order slope `dμ/de` of the degenerate curve generated by `f`:
/// `-⟨∂_e A f, f⟩ / ⟨∂_μ A f, f⟩`.
pub fn kernel_tangent_slope(f: KernelFunction) -> f64 {
    -pairing_between(PairingDirection::E, f, f) / pairing_between(PairingDirection::Mu, f, f)
}
