//! Closed-form monodromy data of the circular case `e = 0`.

use std::f64::consts::PI;

use nalgebra::Matrix4;
use num_complex::Complex64;

use super::SymplecticMatrix4;
use crate::error::{Error, Result};
use crate::model::{coefficient_matrix_b, symplectic_j, ParameterPoint};

/// Spectral data of `γ_{μ,0}(2π) = exp(2π J B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EZeroOracle {
    /// `e^{2πα}` over the four roots `α` of `α⁴ + (2-μ)α² + (1-μ)(1+2μ)`.
    pub eigenvalues: [Complex64; 4],
    /// Frequencies with eigenvalues `e^{±2πiθ}`; defined for `μ ∈ [8/9, 1]`.
    pub theta1: Option<f64>,
    pub theta2: Option<f64>,
    pub monodromy: SymplecticMatrix4,
}

/// Exact monodromy data at `e = 0`.
pub fn e_zero_oracle(mu: f64) -> Result<EZeroOracle> {
    let p = ParameterPoint::new(mu, 0.0)?;
    let disc = 9.0 * mu * mu - 8.0 * mu;
    let elliptic = mu >= 8.0 / 9.0;
    // at μ = 8/9 the discriminant may round to a tiny negative value
    let disc = if elliptic { disc.max(0.0) } else { disc };
    let root = Complex64::new(disc, 0.0).sqrt();

    // roots α² = s of s² + (2-μ)s + (1-μ)(1+2μ)
    let s_plus = 0.5 * (-(2.0 - mu) + root);
    let s_minus = 0.5 * (-(2.0 - mu) - root);
    let a1 = s_plus.sqrt();
    let a2 = s_minus.sqrt();
    let eigenvalues = [
        (a1 * 2.0 * PI).exp(),
        (-a1 * 2.0 * PI).exp(),
        (a2 * 2.0 * PI).exp(),
        (-a2 * 2.0 * PI).exp(),
    ];

    let (theta1, theta2) = if elliptic {
        let d = disc.sqrt();
        (
            Some(((2.0 - mu - d) / 2.0).max(0.0).sqrt()),
            Some(((2.0 - mu + d) / 2.0).sqrt()),
        )
    } else {
        (None, None)
    };

    let generator = symplectic_j() * coefficient_matrix_b(0.0, &p) * (2.0 * PI);
    Ok(EZeroOracle {
        eigenvalues,
        theta1,
        theta2,
        monodromy: SymplecticMatrix4::new(expm(&generator)?),
    })
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
pub fn expm(a: &Matrix4<f64>) -> Result<Matrix4<f64>> {
    let norm = a.abs().row_sum().max();
    if !norm.is_finite() {
        return Err(Error::InvalidParameter {
            name: "matrix norm",
            value: norm,
            reason: "must be finite",
        });
    }
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / 2f64.powi(squarings);

    // ‖scaled‖ ≤ 1/2, so 20 terms reach machine precision
    let mut term = Matrix4::identity();
    let mut sum = Matrix4::identity();
    for k in 1..=20 {
        term = term * scaled / k as f64;
        sum += term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    Ok(sum)
}
