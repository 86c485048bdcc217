//! Closed-form spectrum of `A(μ, 0)` on the `±1` boundary conditions.
//!
//! At `e = 0` the rotated operator `-y'' - 2J₂y' + diag(1+2μ, 1-μ) y`
//! has constant coefficients, so every Fourier mode `ν` spans an invariant
//! 2×2 block `[[ν²+1+2μ, 2iν], [-2iν, ν²+1-μ]]` with characteristic
//! polynomial `p_ν(λ) = λ² - (2ν²+2+μ)λ + (ν²-1)² + (ν²+1)μ - 2μ²`.

use serde::Serialize;

use super::index::IndexPair;
use crate::error::{Error, Result};

// relative size below which p_ν(0) is treated as an exact root
const ROOT_TOL: f64 = 1e-12;

/// Output of [`e_zero_block_oracle`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockOracle {
    pub pair: IndexPair,
    /// Block eigenvalues over all modes, ascending.
    pub eigenvalues: Vec<f64>,
}

/// Block for rotated mode `ν`: trace and determinant of the 2×2 matrix.
fn block_invariants(mu: f64, nu: f64) -> (f64, f64) {
    let n2 = nu * nu;
    (
        2.0 * n2 + 2.0 + mu,
        (n2 - 1.0).powi(2) + (n2 + 1.0) * mu - 2.0 * mu * mu,
    )
}

fn block_eigenvalues(mu: f64, nu: f64) -> [f64; 2] {
    let (tr, det) = block_invariants(mu, nu);
    // the discriminant (ν²+1+2μ - ν²-1+μ)² + 16ν² is a sum of squares
    let disc = (9.0 * mu * mu + 16.0 * nu * nu).sqrt();
    let big = 0.5 * (tr + disc);
    [det / big, big]
}

fn check_omega(sign: i32) -> Result<f64> {
    match sign {
        1 => Ok(0.0),
        -1 => Ok(0.5),
        _ => Err(Error::InvalidParameter {
            name: "omega",
            value: sign as f64,
            reason: "block oracle supports omega = 1 or -1 only",
        }),
    }
}

/// Index, nullity and eigenvalues of `A(μ, 0)` restricted to rotated modes
/// `ν = k + ϑ/2π`, `|k| ≤ n`, for `ω = 1` (`omega_sign = 1`) or
/// `ω = -1` (`omega_sign = -1`).
///
/// A block has a negative eigenvalue iff `p_ν(0) < 0` (its trace is
/// positive) and a zero eigenvalue iff `p_ν(0) = 0`.
pub fn e_zero_block_oracle(mu: f64, omega_sign: i32, n: usize) -> Result<BlockOracle> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::InvalidParameter {
            name: "mu",
            value: mu,
            reason: "must lie in [0, 1]",
        });
    }
    let twist = check_omega(omega_sign)?;
    let nn = n as i64;
    let mut pair = IndexPair {
        index: 0,
        nullity: 0,
    };
    let mut eigenvalues = Vec::with_capacity(2 * (2 * n + 1));
    for k in -nn..=nn {
        let nu = k as f64 + twist;
        let (tr, det) = block_invariants(mu, nu);
        if det.abs() <= ROOT_TOL * tr * tr {
            pair.nullity += 1;
        } else if det < 0.0 {
            pair.index += 1;
        }
        eigenvalues.extend(block_eigenvalues(mu, nu));
    }
    eigenvalues.sort_by(f64::total_cmp);
    Ok(BlockOracle { pair, eigenvalues })
}

/// The exact spectrum of the order-`n` Galerkin matrix at `e = 0`.
///
/// The truncated unrotated basis covers complete rotated blocks only for
/// `ν = ν_k + 1`, `k ∈ [-n, n-2]`; the four edge vectors `(1, ±i)/√2` left
/// without a partner contribute `ν_k² + μ/2` each.
pub fn galerkin_aligned_spectrum(mu: f64, omega_sign: i32, n: usize) -> Result<Vec<f64>> {
    let twist = check_omega(omega_sign)?;
    let nn = n as i64;
    let mut out = Vec::with_capacity(2 * (2 * n + 1));
    for k in -nn..=nn - 2 {
        out.extend(block_eigenvalues(mu, k as f64 + twist + 1.0));
    }
    for k in [-nn, -nn + 1, nn - 1, nn] {
        let nu = k as f64 + twist;
        out.push(nu * nu + 0.5 * mu);
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}
