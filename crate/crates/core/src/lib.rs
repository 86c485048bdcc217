//! Linear stability of the elliptic equilibrium of Robe's restricted
//! three-body problem.
//!
//! The planar linearisation around the equilibrium is a `2π`-periodic
//! Hamiltonian system in the true anomaly, parametrised by the mass ratio
//! `μ ∈ [0, 1]` and the eccentricity `e ∈ [0, 1)`. The crate computes
//!
//! * monodromy matrices, their spectra and normal-form classification
//!   ([`monodromy`]);
//! * Maslov-type ω-indices as Morse indices of a Fourier–Galerkin
//!   truncation of the associated second-order operator ([`spectral`]);
//! * the separation curves of the stability diagram ([`curves`]);
//! * a self-verification suite ([`verify`]).

pub mod curves;
mod error;
mod integrator;
pub mod model;
pub mod monodromy;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use model::{ParameterPoint, UnitCirclePoint};
