//! Dense linear algebra for small Hilbert spaces.
//!
//! Kets and operators are stored as flat `Complex64` vectors in row-major
//! order. Composite indices follow the convention that the first factor is
//! most significant: a bipartite basis state |i⟩⊗|j⟩ sits at flat index
//! `i * d2 + j`. For two polarization qubits the ordered basis is
//! {HH, HV, VH, VV} with H at index 0 and V at index 1.

mod density;
mod json;
mod ket;
mod operator;
mod spectral;

pub use density::{DensityMatrix, Subsystem};
pub use json::{complex_to_json, density_to_json, ket_to_json, operator_to_json};
pub use ket::Ket;
pub use operator::Operator;
pub use spectral::{hermitian_eig_2x2, SpectralBranch, SpectralOperator};

/// Default comparison tolerance for structural checks (normalization,
/// Hermiticity, idempotence, completeness).
pub const TOL: f64 = 1e-12;

/// Eigenvalues of a density matrix may dip this far below zero before the
/// matrix is rejected as non-positive; covers accumulated rounding in
/// partial traces and products of validated states.
pub const NEGATIVITY_FLOOR: f64 = 1e-10;
