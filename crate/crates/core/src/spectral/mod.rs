//! Maslov-type ω-indices through the Morse index of `A(μ,e)`.
//!
//! The ω-index of the monodromy path equals the number of negative
//! eigenvalues of the self-adjoint operator `A(μ,e)` on the ω-twisted
//! boundary condition, and its ω-nullity the dimension of the kernel. Both
//! are computed from a Fourier–Galerkin truncation whose negative spectrum
//! stabilises at low truncation orders.

mod fourier;
mod index;
mod kernel;
mod operator;
mod oracle;

pub use fourier::inverse_kepler_coefficient;
pub use index::{
    count_spectrum, morse_index_nullity, negative_count, IndexPair, IndexResult, SpectralConfig,
};
pub use kernel::{
    a_tilde, kernel_basis_minus_one, kernel_tangent_slope, mu_star, pairing_between,
    perturbation_pairing, KernelBasis, KernelFunction, PairingDirection,
};
pub use operator::{
    assemble_mass_derivative, assemble_operator, assemble_scaled_operator, assemble_zero_mass_part,
    project_onto_basis, TruncatedOperator, MIN_TRUNCATION,
};
pub use oracle::{e_zero_block_oracle, galerkin_aligned_spectrum, BlockOracle};

#[cfg(test)]
mod tests;
