//! Stoquastic local Hamiltonians and everything you can do with them
//! classically: stoquasticity checking, the nonnegative-matrix mapping
//! `G = (I - H/scale)/2`, exact spectral oracles, a post-selected
//! random-walk estimator for the largest eigenvalue of `G`, perturbative
//! gadget reductions down to 2-local interactions, the clock-Hamiltonian
//! encoding of reversible verifier circuits, and a universal-hashing
//! set-size protocol for `Tr(G^L)` counting.
//!
//! A Hamiltonian is *stoquastic* when all off-diagonal matrix elements in
//! the standard basis are real and non-positive. Such Hamiltonians have
//! entrywise non-negative Gibbs and ground states, which is what makes
//! every construction in this crate tick.
//!
//! The crate is organized around one central type,
//! [`ham::LocalHamiltonian`], a sum of few-qubit Hermitian terms stored as
//! small dense matrices. Everything else consumes it:
//!
//! - [`ham`] — terms, stoquasticity reports, basis changes, JSON I/O
//! - [`models`] — standard spin-model generators
//! - [`gmatrix`] — the shifted non-negative matrix `G` with element/row oracles
//! - [`exact`] — dense diagonalization and power iteration ground truth
//! - [`walk`] — the post-selected random-walk eigenvalue estimator
//! - [`gadget`] — subdivision / triple-X / three-qubit gadget compiler
//! - [`clock`] — reversible circuits and their clock Hamiltonians
//! - [`amproto`] — binary ensembles, cycle counting, and the hashing protocol
//!
//! Bit convention used everywhere: qubit `i` is bit `i` of a basis-state
//! index, qubit 0 least significant.

pub mod amproto;
pub mod bits;
pub mod clock;
pub mod dense;
pub mod error;
pub mod exact;
pub mod gadget;
pub mod gmatrix;
pub mod ham;
pub mod models;
pub mod rng;
pub mod walk;

pub use error::StoqError;
pub use gmatrix::{GMatrix, GMode};
pub use ham::{LocalHamiltonian, LocalTerm, StoquasticReport};
