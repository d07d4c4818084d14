//! Numerical thresholds shared across the crate.

/// Hermitian tag: `max|A - A†| <= HERMITIAN_REL * max(1, ‖A‖_F)`.
pub const HERMITIAN_REL: f64 = 1e-10;

/// Unitary tag: `‖A†A - I‖_F <= UNITARY_PER_DIM * dim`.
pub const UNITARY_PER_DIM: f64 = 1e-9;

/// Two eigenvalues share a block when `|a - b| <= GROUPING_REL * max(1, ‖A‖_F)`.
pub const GROUPING_REL: f64 = 1e-8;

/// Jacobi stops once the off-diagonal Frobenius norm is below this fraction of `‖A‖_F`.
pub const JACOBI_REL: f64 = 1e-12;

pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalue gap used to split clusters while diagonalizing a unitary.
/// Loose on purpose: members of one cluster are separated again by a
/// second (and third) Hermitian solve restricted to the cluster.
pub const UNITARY_CLUSTER_GAP: f64 = 1e-4;

/// Default relative rank tolerance for Lie closure.
pub const RANK_TOL: f64 = 1e-9;

/// Off-block Frobenius mass allowed (times `sqrt(d)`) for membership in the
/// translated block group.
pub const MEMBERSHIP_PER_SQRT_DIM: f64 = 1e-8;

/// Density matrix checks (positivity, unit trace).
pub const DENSITY: f64 = 1e-10;
