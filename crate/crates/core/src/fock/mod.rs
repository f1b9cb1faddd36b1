//! Dense-matrix oracle on the truncated two-mode Fock space.
//!
//! Every operator is a `(n_max+1)² × (n_max+1)²` matrix in the occupation
//! basis `|n1, n2⟩`. Results are only trusted for states well below the
//! cutoff shell; see [`safe_shell`].

mod evolve;
mod family;
mod metric;
mod operators;
mod space;

pub use evolve::{evolve, Trajectory};
pub use family::{
    build_families, build_families_unchecked, vacuum_state, BiorthogonalFamily, VacuumState,
    VACUUM_TOL,
};
pub use metric::{
    build_metric, expansion_coefficients, physical_inner_product, Expansion, MetricOperator,
};
pub use operators::{
    assemble_hamiltonian, commutator_matrix, ladder_matrix, lowest_eigenvalues, number_matrix,
    oracle_spectrum, pseudo_number_matrix,
};
pub use space::TruncatedSpace;

/// Default per-mode cutoff.
pub const DEFAULT_N_MAX: usize = 20;

/// Largest total occupation `n1 + n2` treated as trustworthy for a cutoff.
pub fn safe_shell(n_max: usize) -> usize {
    n_max / 2
}
