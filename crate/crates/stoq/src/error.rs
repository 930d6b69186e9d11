//! Error type shared by all modules.

use crate::ham::StoquasticReport;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StoqError {
    #[error("bitstring length mismatch: expected {expected} qubits, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },

    #[error("term on {support:?} is not Hermitian (max |M - M^dag| = {max_dev:e})")]
    NotHermitian { support: Vec<usize>, max_dev: f64 },

    #[error("term support {support:?} exceeds locality bound k = {k}")]
    LocalityExceeded { support: Vec<usize>, k: usize },

    #[error("invalid term support {support:?}: indices must be sorted and distinct")]
    BadSupport { support: Vec<usize> },

    #[error("{n} qubits exceeds the capacity cap of {cap} for this operation")]
    CapacityExceeded { n: usize, cap: usize },

    #[error("Hamiltonian is not stoquastic ({} violations)", report.violations.len())]
    NotStoquastic { report: StoquasticReport },

    #[error("Hamiltonian is not termwise stoquastic ({} violations)", report.violations.len())]
    NotTermwiseStoquastic { report: StoquasticReport },

    #[error("power iteration did not converge in {iterations} iterations (last estimate {last})")]
    NoConvergence { last: f64, iterations: usize },

    #[error("row sum {value} at state {state} outside [1/4, 1]; walk scaling is malformed")]
    RowSumOutOfRange { state: u64, value: f64 },

    #[error("post-selection failed: {collected}/{wanted} clean walks, survival rate {success_rate:e}")]
    PostSelectionFailure {
        collected: usize,
        wanted: usize,
        success_rate: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown model name: {0}")]
    UnknownModel(String),

    #[error("resolvent evaluated at z = {z}, within {dist:e} of the high-energy spectrum")]
    ResolventSingularity { z: f64, dist: f64 },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("invalid input: {0}")]
    BadInput(String),
}
