//! Perturbative gadget compiler: k-local termwise-stoquastic Hamiltonians
//! down to 2-local stoquastic Hamiltonians.
//!
//! The chain has three kinds of stages, each introducing mediator qubits
//! whose low-energy sector reproduces the target interaction:
//!
//! 1. [`subdivision_reduce`](subdivision::subdivision_reduce) halves
//!    interaction arity, `k`-local to `ceil(k/2)+1`-local, at second
//!    order in perturbation theory.
//! 2. [`normalize_3local`](normalize::normalize_3local) rewrites a
//!    3-local Hamiltonian so that every 3-qubit interaction is a product
//!    of raising/lowering operators (at most three subdivision passes).
//! 3. [`triple_x_reduce`](triplex::triple_x_reduce) converts those
//!    raising/lowering triples into `-h X(x)X(x)X` interactions with
//!    `h >= 0` (a *triple-X* Hamiltonian) using three mediator qubits per
//!    triple at third order.
//! 4. [`kkr_3to2_reduce`](kkr::kkr_3to2_reduce) eliminates the remaining
//!    three-qubit `X X X` products with the Kempe-Kitaev-Regev three-qubit
//!    gadget, landing on a 2-local stoquastic Hamiltonian.
//!
//! Every stage preserves termwise stoquasticity, tracks the scalar energy
//! shift `Omega` that must be subtracted before comparing ground energies,
//! and (when the compiled system is small enough) verifies itself by dense
//! diagonalization. [`self_energy`](self_energy::self_energy) computes the
//! perturbative series order by order for direct inspection.

pub mod decompose;
pub mod kkr;
pub mod normalize;
pub mod self_energy;
pub mod subdivision;
pub mod triplex;

pub use decompose::{decompose_target, Decomposition, OperatorPair};
pub use kkr::kkr_3to2_reduce;
pub use normalize::normalize_3local;
pub use self_energy::{self_energy, PerturbationSplit, SelfEnergyReport};
pub use subdivision::subdivision_reduce;
pub use triplex::triple_x_reduce;

use crate::error::StoqError;
use crate::exact;
use crate::ham::LocalHamiltonian;
use serde::{Deserialize, Serialize};

/// Dense verification is attempted automatically up to this many qubits.
pub const VERIFY_CAP: usize = 12;

/// Triple-X gadget scalings: `omega = delta^-4`, `delta_x = delta^-5`,
/// `delta_z = delta^-6`, so `omega << delta_x << delta_z` with ratios
/// exactly `delta`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TripleXScaling {
    pub delta: f64,
    pub omega: f64,
    pub delta_x: f64,
    pub delta_z: f64,
}

impl TripleXScaling {
    pub fn new(delta: f64) -> Result<Self, StoqError> {
        if !(0.0 < delta && delta < 1.0) {
            return Err(StoqError::Precondition(format!(
                "delta = {delta} must lie in (0, 1)"
            )));
        }
        Ok(TripleXScaling {
            delta,
            omega: delta.powi(-4),
            delta_x: delta.powi(-5),
            delta_z: delta.powi(-6),
        })
    }
}

/// Three-qubit gadget scalings: `omega = delta^-2`, `delta_z = delta^-3`,
/// and no transverse mediator term.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KkrScaling {
    pub delta: f64,
    pub omega: f64,
    pub delta_z: f64,
}

impl KkrScaling {
    pub fn new(delta: f64) -> Result<Self, StoqError> {
        if !(0.0 < delta && delta < 1.0) {
            return Err(StoqError::Precondition(format!(
                "delta = {delta} must lie in (0, 1)"
            )));
        }
        Ok(KkrScaling {
            delta,
            omega: delta.powi(-2),
            delta_z: delta.powi(-3),
        })
    }
}

/// Which mediators serve which target interaction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MediatorAssignment {
    pub mediators: Vec<usize>,
    pub target_support: Vec<usize>,
}

/// A compiled stage: the mediator-qubit Hamiltonian, the scalar shift to
/// subtract, and (when dense verification ran) the spectral error
/// `|lambda(compiled) - omega_shift - lambda(target)|`.
#[derive(Debug, Clone)]
pub struct GadgetResult {
    pub compiled: LocalHamiltonian,
    pub omega_shift: f64,
    pub mediator_map: Vec<MediatorAssignment>,
    pub verified_error: Option<f64>,
}

impl GadgetResult {
    /// Dense spectral verification against a target; stores and returns
    /// the error.
    pub fn verify_against(&mut self, target: &LocalHamiltonian) -> Result<f64, StoqError> {
        let compiled_summary = exact::diagonalize_dense_capped(&self.compiled, VERIFY_CAP)?;
        let target_summary = exact::diagonalize_dense_capped(target, VERIFY_CAP)?;
        let err =
            (compiled_summary.lambda0 - self.omega_shift - target_summary.lambda0).abs();
        self.verified_error = Some(err);
        Ok(err)
    }

    fn try_verify(&mut self, target: &LocalHamiltonian) {
        if self.compiled.n() <= VERIFY_CAP && target.n() <= VERIFY_CAP {
            let _ = self.verify_against(target);
        }
    }
}

/// Serializable view of a gadget result for the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GadgetResultJson {
    pub n_data: usize,
    pub n_total: usize,
    pub locality: usize,
    pub omega_shift: f64,
    pub mediator_map: Vec<MediatorAssignment>,
    pub verified_error: Option<f64>,
    pub termwise_stoquastic: bool,
}

impl GadgetResult {
    pub fn summary(&self, n_data: usize) -> GadgetResultJson {
        let locality = self
            .compiled
            .terms()
            .iter()
            .map(|t| t.arity())
            .max()
            .unwrap_or(0);
        let termwise = self
            .compiled
            .terms()
            .iter()
            .all(|t| t.is_stoquastic());
        GadgetResultJson {
            n_data,
            n_total: self.compiled.n(),
            locality,
            omega_shift: self.omega_shift,
            mediator_map: self.mediator_map.clone(),
            verified_error: self.verified_error,
            termwise_stoquastic: termwise,
        }
    }
}
