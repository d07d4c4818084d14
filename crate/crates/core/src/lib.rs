//! Hamiltonian synthesis by searching the set of propagators that reproduce a state-to-state map.
//!
//! Given an initial state, a desired Hamiltonian, an always-on internal
//! Hamiltonian and an evolution time, the crate characterizes every
//! Hamiltonian that performs the same state-to-state map, and searches that
//! set for a member inside the Lie algebra generated by the available
//! controls.
//!
//! Modules, bottom up:
//! - [`operator`]: dense complex matrices, Jacobi eigensolvers, exponentials.
//! - [`lie`]: Lie closure, eigenvector-stabilizing subspaces, projections.
//! - [`spin`]: Pauli operators and spin-chain Hamiltonians.
//! - [`equivalence`]: the equivalence frame, the unitary coset and the
//!   logarithm parameterization of equivalent Hamiltonians.
//! - [`synthesis`]: numerical search for an implementable equivalent.
//! - [`dynamics`]: piecewise-constant evolution and fidelity curves.
//! - [`cli`]: command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod equivalence;
pub mod error;
pub mod lie;
pub mod operator;
pub mod spin;
pub mod synthesis;
pub mod tolerance;

pub use error::{Error, Result};
pub use operator::{hs_inner, OperatorMatrix, StateVector, C64};
