//! Fourier–Galerkin truncation of the second-order operator
//! `A(μ,e) = -d²/dt² - I₂ + (2+μ)/(2(1+e cos t)) I₂ + 3μ/(2(1+e cos t)) S(t)`
//! on `y(2π) = ω y(0)`, `ẏ(2π) = ω ẏ(0)`.
//!
//! The basis is `e^{iν_k t} e_j / √(2π)` with `ν_k = k + ϑ_ω/2π`,
//! `k ∈ [-N, N]` and `j ∈ {0, 1}`, at index `2(k + N) + j`. Consecutive
//! truncation orders are nested: the order-`N` matrix is the central block
//! of the order-`N'` matrix for every `N' > N`.

use faer::{c64, Mat, Side};

use super::fourier::coefficient_table;
use crate::error::{Error, Result};
use crate::model::{ParameterPoint, UnitCirclePoint};

/// Smallest accepted truncation order.
pub const MIN_TRUNCATION: usize = 4;

/// Hermitian Galerkin matrix of dimension `2(2N+1)`.
#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    matrix: Mat<c64>,
    truncation_order: usize,
    omega: UnitCirclePoint,
    params: ParameterPoint,
}

/// Which operator to discretise; all are affine in the potential weights.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Weights {
    /// multiplies `-d²/dt² - I₂`
    free: f64,
    /// multiplies `k(t) I₂`
    scalar: f64,
    /// multiplies `k(t) S(t)`
    rotating: f64,
}

impl TruncatedOperator {
    pub fn matrix(&self) -> &Mat<c64> {
        &self.matrix
    }

    pub fn truncation_order(&self) -> usize {
        self.truncation_order
    }

    pub fn omega(&self) -> UnitCirclePoint {
        self.omega
    }

    pub fn params(&self) -> ParameterPoint {
        self.params
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `max |A - A*| / max |A|`.
    pub fn hermitian_residual(&self) -> f64 {
        let n = self.dim();
        let mut diff: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let a = self.matrix[(i, j)];
                diff = diff.max((a - self.matrix[(j, i)].conj()).norm());
                scale = scale.max(a.norm());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            diff / scale
        }
    }

    /// Largest absolute diagonal entry; sets the scale of the zero band.
    pub fn diagonal_scale(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.matrix[(i, i)].re.abs())
            .fold(0.0, f64::max)
    }

    /// The operator at a lower truncation order `n ≤ N`, taken as the
    /// central block.
    pub fn truncated(&self, n: usize) -> TruncatedOperator {
        assert!(
            n <= self.truncation_order,
            "cannot raise truncation order by slicing"
        );
        let offset = 2 * (self.truncation_order - n);
        let dim = 2 * (2 * n + 1);
        TruncatedOperator {
            matrix: self.matrix.submatrix(offset, offset, dim, dim).to_owned(),
            truncation_order: n,
            omega: self.omega,
            params: self.params,
        }
    }

    /// All eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.matrix
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|_| Error::EigenSolverFailed {
                dimension: self.dim(),
            })
    }

    /// Matrix–vector product in basis coordinates.
    pub fn apply(&self, x: &[c64]) -> Vec<c64> {
        assert_eq!(x.len(), self.dim());
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.matrix[(i, j)] * x[j]).sum())
            .collect()
    }
}

/// Galerkin matrix of `A(μ,e)` at truncation order `n`.
pub fn assemble_operator(
    p: &ParameterPoint,
    w: UnitCirclePoint,
    n: usize,
) -> Result<TruncatedOperator> {
    let mu = p.mu();
    let weights = Weights {
        free: 1.0,
        scalar: (2.0 + mu) / 2.0,
        rotating: 1.5 * mu,
    };
    assemble(p, w, n, weights)
}

/// Galerkin matrix of `A(0,e) = -d²/dt² - I₂ + I₂/(1 + e cos t)`.
pub fn assemble_zero_mass_part(
    p: &ParameterPoint,
    w: UnitCirclePoint,
    n: usize,
) -> Result<TruncatedOperator> {
    let weights = Weights {
        free: 1.0,
        scalar: 1.0,
        rotating: 0.0,
    };
    assemble(p, w, n, weights)
}

/// Galerkin matrix of `∂A/∂μ = (I₂ + 3S(t)) / (2(1 + e cos t))`, so that
/// `A(μ,e) = A(0,e) + μ ∂A/∂μ`.
pub fn assemble_mass_derivative(
    p: &ParameterPoint,
    w: UnitCirclePoint,
    n: usize,
) -> Result<TruncatedOperator> {
    let weights = Weights {
        free: 0.0,
        scalar: 0.5,
        rotating: 1.5,
    };
    assemble(p, w, n, weights)
}

/// Galerkin matrix of `Ā(μ,e) = A(0,e)/μ + (I₂ + 3S(t)) / (2(1 + e cos t))`
/// for `μ > 0`; it has the same null space as `A(μ,e)`.
pub fn assemble_scaled_operator(
    p: &ParameterPoint,
    w: UnitCirclePoint,
    n: usize,
) -> Result<TruncatedOperator> {
    let mu = p.mu();
    if mu <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "mu",
            value: mu,
            reason: "the scaled operator needs mu > 0",
        });
    }
    let weights = Weights {
        free: 1.0 / mu,
        scalar: 1.0 / mu + 0.5,
        rotating: 1.5,
    };
    assemble(p, w, n, weights)
}

fn assemble(
    p: &ParameterPoint,
    w: UnitCirclePoint,
    n: usize,
    weights: Weights,
) -> Result<TruncatedOperator> {
    if n < MIN_TRUNCATION {
        return Err(Error::InvalidParameter {
            name: "truncation order",
            value: n as f64,
            reason: "must be at least 4",
        });
    }
    let nn = n as i64;
    let dim = 2 * (2 * n + 1);
    let twist = w.twist();
    // differences k - l reach ±2N, shifted by ±2 for the S(t) terms
    let max_m = 2 * n + 2;
    let c = coefficient_table(p.e(), max_m);
    let coef = |m: i64| c[(m + max_m as i64) as usize];

    let mut matrix = Mat::<c64>::zeros(dim, dim);
    for k in -nn..=nn {
        for l in -nn..=nn {
            let m = k - l;
            let scalar = weights.scalar * coef(m);
            // k(t) cos 2t and k(t) sin 2t at frequency m
            let cos2 = 0.5 * (coef(m - 2) + coef(m + 2));
            let sin2 = c64::new(0.0, -0.5 * (coef(m - 2) - coef(m + 2)));
            let r = weights.rotating;
            let block = [
                [c64::new(scalar + r * cos2, 0.0), sin2 * r],
                [sin2 * r, c64::new(scalar - r * cos2, 0.0)],
            ];
            let (bk, bl) = (2 * (k + nn) as usize, 2 * (l + nn) as usize);
            for i in 0..2 {
                for j in 0..2 {
                    matrix[(bk + i, bl + j)] = block[i][j];
                }
            }
            if k == l {
                let nu = k as f64 + twist;
                for i in 0..2 {
                    matrix[(bk + i, bk + i)] += c64::new(weights.free * (nu * nu - 1.0), 0.0);
                }
            }
        }
    }
    // exact Hermitian symmetry, independent of rounding in the table
    for i in 0..dim {
        matrix[(i, i)] = c64::new(matrix[(i, i)].re, 0.0);
        for j in 0..i {
            let avg = 0.5 * (matrix[(i, j)] + matrix[(j, i)].conj());
            matrix[(i, j)] = avg;
            matrix[(j, i)] = avg.conj();
        }
    }
    Ok(TruncatedOperator {
        matrix,
        truncation_order: n,
        omega: w,
        params: *p,
    })
}

/// Coefficients of a `2π`-(quasi)periodic `f: R → C²` with
/// `f(t + 2π) = ω f(t)` in the basis of [`assemble_operator`].
///
/// Uses the trapezoid rule on `samples` points, exact for trigonometric
/// polynomials of degree below `samples - N`.
pub fn project_onto_basis<F>(f: F, w: UnitCirclePoint, n: usize, samples: usize) -> Vec<c64>
where
    F: Fn(f64) -> [f64; 2],
{
    let nn = n as i64;
    let twist = w.twist();
    let h = 2.0 * std::f64::consts::PI / samples as f64;
    let values: Vec<(f64, [f64; 2])> = (0..samples)
        .map(|s| (s as f64 * h, f(s as f64 * h)))
        .collect();
    let norm = h / (2.0 * std::f64::consts::PI).sqrt();
    let mut out = Vec::with_capacity(2 * (2 * n + 1));
    for k in -nn..=nn {
        let nu = k as f64 + twist;
        for j in 0..2 {
            let sum: c64 = values
                .iter()
                .map(|&(t, v)| c64::from_polar(v[j], -nu * t))
                .sum();
            out.push(sum * norm);
        }
    }
    out
}
