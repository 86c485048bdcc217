//! Parameter space and the time-dependent coefficient matrices of the
//! planar linearised system around the elliptic equilibrium.
//!
//! Time is the true anomaly `t` of the primaries' Kepler orbit, and every
//! coefficient is `2π`-periodic in `t`. The state vector of the first-order
//! system is `(ẋ - y, ẏ + x, x, y)` and the flow is `ẇ = J B(t) w` with the
//! standard symplectic matrix `J = [[0, -I₂], [I₂, 0]]`.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest eccentricity accepted by [`ParameterPoint::new`].
pub const DEFAULT_E_MAX: f64 = 0.99;

/// A point `(μ, e)` of the parameter rectangle `[0, 1] × [0, e_max]`.
///
/// `mu` is the mass ratio of the secondary, `e` the eccentricity of the
/// primaries' orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParameterPoint {
    mu: f64,
    e: f64,
}

impl ParameterPoint {
    pub fn new(mu: f64, e: f64) -> Result<Self> {
        Self::with_e_max(mu, e, DEFAULT_E_MAX)
    }

    /// Builds a point with a caller-chosen eccentricity bound, which must
    /// itself lie strictly below 1.
    pub fn with_e_max(mu: f64, e: f64, e_max: f64) -> Result<Self> {
        if !(e_max.is_finite() && (0.0..1.0).contains(&e_max)) {
            return Err(Error::InvalidParameter {
                name: "e_max",
                value: e_max,
                reason: "must lie in [0, 1)",
            });
        }
        if !(mu.is_finite() && (0.0..=1.0).contains(&mu)) {
            return Err(Error::InvalidParameter {
                name: "mu",
                value: mu,
                reason: "must lie in [0, 1]",
            });
        }
        if !(e.is_finite() && (0.0..=e_max).contains(&e)) {
            return Err(Error::InvalidParameter {
                name: "e",
                value: e,
                reason: "must lie in [0, e_max]",
            });
        }
        Ok(Self { mu, e })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn e(&self) -> f64 {
        self.e
    }

    /// `1 / (1 + e cos t)`, the common factor of every time-dependent term.
    pub fn kepler_factor(&self, t: f64) -> f64 {
        1.0 / (1.0 + self.e * t.cos())
    }
}

/// A point `ω = exp(iϑ)` on the unit circle, stored by its angle
/// `ϑ ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitCirclePoint {
    angle: f64,
}

impl UnitCirclePoint {
    pub fn new(angle: f64) -> Self {
        let mut a = angle.rem_euclid(2.0 * PI);
        // rem_euclid can round up to exactly 2π for tiny negative inputs
        if a >= 2.0 * PI {
            a = 0.0;
        }
        Self { angle: a }
    }

    pub fn one() -> Self {
        Self { angle: 0.0 }
    }

    pub fn minus_one() -> Self {
        Self { angle: PI }
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z.im.atan2(z.re))
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle)
    }

    /// Fractional twist `ϑ / 2π ∈ [0, 1)` of the boundary condition
    /// `y(2π) = ω y(0)`.
    pub fn twist(&self) -> f64 {
        self.angle / (2.0 * PI)
    }

    pub fn is_one(&self) -> bool {
        self.angle == 0.0
    }
}

/// The standard symplectic matrix `[[0, -I₂], [I₂, 0]]`.
pub fn symplectic_j() -> Matrix4<f64> {
    let mut j = Matrix4::zeros();
    j[(0, 2)] = -1.0;
    j[(1, 3)] = -1.0;
    j[(2, 0)] = 1.0;
    j[(3, 1)] = 1.0;
    j
}

/// `J₂ = [[0, -1], [1, 0]]`, the generator of plane rotations.
pub fn j2() -> Matrix2<f64> {
    Matrix2::new(0.0, -1.0, 1.0, 0.0)
}

/// Plane rotation `R(t)` by angle `t`.
pub fn rotation(t: f64) -> Matrix2<f64> {
    let (s, c) = t.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// `R₄(t) = diag(R(t), R(t))`.
pub fn rotation_r4(t: f64) -> Matrix4<f64> {
    let r = rotation(t);
    let mut out = Matrix4::zeros();
    out.fixed_view_mut::<2, 2>(0, 0).copy_from(&r);
    out.fixed_view_mut::<2, 2>(2, 2).copy_from(&r);
    out
}

/// Reflection `S(t) = [[cos 2t, sin 2t], [sin 2t, -cos 2t]]`.
pub fn s_matrix(t: f64) -> Matrix2<f64> {
    let (s, c) = (2.0 * t).sin_cos();
    Matrix2::new(c, s, s, -c)
}

/// Symmetric coefficient matrix `B(t)` of `ẇ = J B(t) w`.
pub fn coefficient_matrix_b(t: f64, p: &ParameterPoint) -> Matrix4<f64> {
    let q = q_matrix(t, p);
    let mut b = Matrix4::zeros();
    b[(0, 0)] = 1.0;
    b[(1, 1)] = 1.0;
    b[(2, 2)] = 1.0 - q[(0, 0)];
    b[(3, 3)] = 1.0 - q[(1, 1)];
    for &(i, j, v) in &[(0, 3, 1.0), (1, 2, -1.0)] {
        b[(i, j)] = v;
        b[(j, i)] = v;
    }
    b
}

/// `Q(t) = diag(1 + 2μ, 1 - μ) / (1 + e cos t)`.
pub fn q_matrix(t: f64, p: &ParameterPoint) -> Matrix2<f64> {
    let k = p.kepler_factor(t);
    Matrix2::new((1.0 + 2.0 * p.mu) * k, 0.0, 0.0, (1.0 - p.mu) * k)
}

/// Multiplicative part of the second-order operator,
/// `-I₂ + [(2 + μ) I₂ + 3μ S(t)] / (2 (1 + e cos t))`.
pub fn second_order_potential(t: f64, p: &ParameterPoint) -> Matrix2<f64> {
    let k = 0.5 * p.kepler_factor(t);
    let s = s_matrix(t);
    let scalar = (2.0 + p.mu) * k - 1.0;
    let m = 3.0 * p.mu * k;
    Matrix2::new(
        scalar + m * s[(0, 0)],
        m * s[(0, 1)],
        m * s[(1, 0)],
        scalar + m * s[(1, 1)],
    )
}

/// The same potential written as `-I₂ + R(t) Q(t) R(t)ᵀ`; the off-diagonal is
/// averaged so the result is exactly symmetric.
pub fn second_order_potential_rotated(t: f64, p: &ParameterPoint) -> Matrix2<f64> {
    let r = rotation(t);
    let mut m = r * q_matrix(t, p) * r.transpose() - Matrix2::identity();
    let off = 0.5 * (m[(0, 1)] + m[(1, 0)]);
    m[(0, 1)] = off;
    m[(1, 0)] = off;
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn pp(mu: f64, e: f64) -> ParameterPoint {
        ParameterPoint::new(mu, e).unwrap()
    }

    #[test]
    fn parameter_bounds_are_enforced() {
        assert!(ParameterPoint::new(-0.1, 0.0).is_err());
        assert!(ParameterPoint::new(1.5, 0.0).is_err());
        assert!(ParameterPoint::new(0.5, 0.995).is_err());
        assert!(ParameterPoint::new(0.5, -1e-3).is_err());
        assert!(ParameterPoint::new(f64::NAN, 0.0).is_err());
        assert!(ParameterPoint::with_e_max(0.5, 0.5, 1.0).is_err());
        assert!(ParameterPoint::with_e_max(0.5, 0.95, 0.9).is_err());
        assert!(ParameterPoint::new(0.0, 0.0).is_ok());
        assert!(ParameterPoint::new(1.0, 0.99).is_ok());
    }

    #[test]
    fn b_matrix_examples() {
        let b = coefficient_matrix_b(0.0, &pp(0.0, 0.0));
        let expected = Matrix4::new(
            1.0, 0.0, 0.0, 1.0, //
            0.0, 1.0, -1.0, 0.0, //
            0.0, -1.0, 0.0, 0.0, //
            1.0, 0.0, 0.0, 0.0,
        );
        assert_eq!(b, expected);

        for &t in &[0.0, 1.3, -4.0, 10.0] {
            let b = coefficient_matrix_b(t, &pp(0.5, 0.0));
            let expected = Matrix4::new(
                1.0, 0.0, 0.0, 1.0, //
                0.0, 1.0, -1.0, 0.0, //
                0.0, -1.0, -1.0, 0.0, //
                1.0, 0.0, 0.0, 0.5,
            );
            assert_abs_diff_eq!(b, expected, epsilon = 1e-15);
        }

        let b = coefficient_matrix_b(PI, &pp(0.5, 0.5));
        assert_abs_diff_eq!(b[(2, 2)], -3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b[(3, 3)], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn q_matrix_examples() {
        assert_eq!(q_matrix(0.0, &pp(0.0, 0.0)), Matrix2::identity());
        assert_abs_diff_eq!(
            q_matrix(0.0, &pp(1.0, 0.5)),
            Matrix2::new(2.0, 0.0, 0.0, 0.0),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            q_matrix(PI / 2.0, &pp(0.5, 0.9)),
            Matrix2::new(2.0, 0.0, 0.0, 0.5),
            epsilon = 1e-14
        );
    }

    #[test]
    fn r4_examples() {
        assert_eq!(rotation_r4(0.0), Matrix4::identity());
        assert_abs_diff_eq!(rotation_r4(2.0 * PI), Matrix4::identity(), epsilon = 1e-15);
        let q = rotation_r4(PI / 2.0);
        let mut expected = Matrix4::zeros();
        expected[(0, 1)] = -1.0;
        expected[(1, 0)] = 1.0;
        expected[(2, 3)] = -1.0;
        expected[(3, 2)] = 1.0;
        assert_abs_diff_eq!(q, expected, epsilon = 1e-15);
    }

    #[test]
    fn potential_examples() {
        for &t in &[0.0, 0.4, 2.0] {
            assert_abs_diff_eq!(
                second_order_potential(t, &pp(0.0, 0.0)),
                Matrix2::zeros(),
                epsilon = 1e-15
            );
        }
        assert_abs_diff_eq!(
            second_order_potential(0.0, &pp(1.0, 0.0)),
            Matrix2::new(2.0, 0.0, 0.0, -1.0),
            epsilon = 1e-15
        );
        let p = pp(0.37, 0.21);
        assert_abs_diff_eq!(
            second_order_potential(0.7, &p),
            second_order_potential_rotated(0.7, &p),
            epsilon = 1e-14
        );
    }

    #[test]
    fn unit_circle_normalisation() {
        assert_abs_diff_eq!(
            UnitCirclePoint::new(-PI / 2.0).angle(),
            1.5 * PI,
            epsilon = 1e-15
        );
        assert_eq!(UnitCirclePoint::new(2.0 * PI).angle(), 0.0);
        assert!(UnitCirclePoint::new(-1e-300).angle() < 2.0 * PI);
        let w = UnitCirclePoint::minus_one();
        assert_abs_diff_eq!(w.to_complex().re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.twist(), 0.5);
    }

    #[test]
    fn j_is_symplectic_generator() {
        let j = symplectic_j();
        assert_eq!(j * j, -Matrix4::identity());
        assert_eq!(j.transpose(), -j);
        assert_eq!(j2() * j2(), -Matrix2::identity());
    }

    proptest! {
        #[test]
        fn b_symmetric_periodic_and_tied_to_q(t in -20.0..20.0f64, mu in 0.0..=1.0f64, e in 0.0..0.99f64) {
            let p = pp(mu, e);
            let b = coefficient_matrix_b(t, &p);
            prop_assert_eq!(b, b.transpose());
            let q = q_matrix(t, &p);
            prop_assert_eq!(b[(2, 2)], 1.0 - q[(0, 0)]);
            prop_assert_eq!(b[(3, 3)], 1.0 - q[(1, 1)]);
            // exact periodicity holds when t + 2π is representable with the
            // same cosine; compare against the shifted evaluation directly
            let shifted = coefficient_matrix_b(t + 2.0 * PI, &p);
            prop_assert!((shifted - b).amax() <= 1e-12);
        }

        #[test]
        fn potential_forms_agree(t in -20.0..20.0f64, mu in 0.0..=1.0f64, e in 0.0..0.99f64) {
            let p = pp(mu, e);
            let a = second_order_potential(t, &p);
            let b = second_order_potential_rotated(t, &p);
            let scale = 1.0 + p.kepler_factor(t);
            prop_assert!((a - b).amax() <= 1e-13 * scale);
            prop_assert_eq!(a, a.transpose());
        }

        #[test]
        fn parameters_outside_the_rectangle_are_rejected(mu in -2.0..3.0f64, e in -1.0..1.5f64) {
            let inside = (0.0..=1.0).contains(&mu) && (0.0..=DEFAULT_E_MAX).contains(&e);
            prop_assert_eq!(ParameterPoint::new(mu, e).is_ok(), inside);
        }

        #[test]
        fn angles_are_normalized(angle in -100.0..100.0f64) {
            let w = UnitCirclePoint::new(angle);
            prop_assert!((0.0..2.0 * PI).contains(&w.angle()));
            prop_assert!((w.to_complex() - Complex64::from_polar(1.0, angle)).norm() < 1e-12);
        }

        #[test]
        fn r4_is_a_rotation(t in -50.0..50.0f64) {
            let r = rotation_r4(t);
            prop_assert!((r.transpose() * r - Matrix4::identity()).amax() < 1e-14);
            prop_assert!((r.determinant() - 1.0).abs() < 1e-14);
        }
    }
}
