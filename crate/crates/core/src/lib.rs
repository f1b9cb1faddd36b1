//! Pseudo-boson diagonalization of a two-mode non-Hermitian bosonic
//! Hamiltonian
//!
//! ```text
//! H = α11 a1*a1 + α22 a2*a2 + α12 (a1*a2 − a2*a1)
//!   + ½β11 (a1*² − a1²) + ½β22 (a2*² − a2²) + β12 (a1*a2* − a2a1)
//! ```
//!
//! The crate is split into three layers:
//!
//! - [`algebra`]: the 4×4 equation-of-motion problem, closed-form
//!   eigenvalues, symplectically normalized eigenvectors and the
//!   pseudo-boson ladder coefficients.
//! - [`fock`]: a brute-force oracle on a truncated two-mode Fock space
//!   (spectrum, biorthogonal eigenfamilies, metric operator, time evolution).
//! - [`statmech`]: grand-canonical thermodynamics of the diagonalized model.
//!
//! [`verify`] aggregates the invariants of all three into a list of
//! pass/fail records.

// `!(x <= tol)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod error;
pub mod fock;
pub mod params;
pub mod sampling;
pub mod statmech;
pub mod verify;

pub use algebra::{
    adjoint_eigenvector_map, analytic_eigenvalues, build_adjoint_dynamical_matrix,
    build_dynamical_matrix, characteristic_coefficients, commutator, compute_eigenbasis,
    diagonal_form, eigenbasis_unchecked, energy_levels, AnalyticEigenvalues,
    CharacteristicCoefficients, DiagonalForm, DynamicalMatrix, EnergyLevel, LadderCoefficients,
    LadderKind, Regime, SymplecticEigenbasis,
};
pub use error::{Error, Result};
pub use params::ModelParameters;
