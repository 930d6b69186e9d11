//! The triple-X gadget: raising/lowering triples to `-h XXX` triples.
//!
//! For a target `H_else - 3g (B1 (x) B2 (x) B3 + h.c.)` with each `B_j` a
//! raising or lowering operator, introduce three mediator qubits with
//!
//!   H_M = -(delta_x/2) (X X X - I)
//!         -(delta_z/4) (Z1 Z2 + Z2 Z3 + Z1 Z3 - 3 I)
//!   V   = -omega sum_j (B_j (x) raise_j + B_j^dag (x) lower_j) + H_else
//!
//! at scalings `omega = delta^-4, delta_x = delta^-5, delta_z = delta^-6`.
//! `H_M` has the unique zero-energy ground state `(|000> + |111>)/sqrt(2)`
//! on the mediators, first excited state at `delta_x`, and a six-state
//! band near `delta_z`. Second order in `V` contributes the scalar
//!
//!   Omega = -(3/4) omega^2 g^{2/3}... per unit-norm B; in general
//!   Omega = -(omega^2/4) (sum_j ||B_j||^2) [1/delta_z + 1/(delta_z +
//!   delta_x)]
//!
//! and third order reproduces `-3(B1 B2 B3 + h.c.)` because
//! `omega^3 = delta_z^2`. The only three-qubit interaction in the output
//! is `-(delta_x/2) XXX`, so the result is a triple-X Hamiltonian.

use super::{GadgetResult, MediatorAssignment, TripleXScaling};
use crate::dense::{kron, pauli_x, pauli_z, sigma_minus, sigma_plus};
use crate::error::StoqError;
use crate::ham::{LocalHamiltonian, LocalTerm};
use nalgebra::DMatrix;

/// One raising/lowering triple extracted from the input.
#[derive(Debug, Clone)]
pub(crate) struct Triple {
    pub support: Vec<usize>,
    /// Per leg: true = raising (|1><0|), false = lowering.
    pub raising: [bool; 3],
    /// Coefficient g in `-3g (B1 B2 B3 + h.c.)`.
    pub g: f64,
}

/// Parse a Hamiltonian in normal form into 2-local bystanders and triples.
pub(crate) fn parse_normal_form(
    h: &LocalHamiltonian,
) -> Result<(Vec<LocalTerm>, Vec<Triple>), StoqError> {
    let report = h.check_stoquastic(true)?;
    if !report.is_termwise_stoquastic {
        return Err(StoqError::NotTermwiseStoquastic { report });
    }
    let mut bystanders = Vec::new();
    let mut triples = Vec::new();
    for term in h.terms() {
        if term.arity() <= 2 {
            bystanders.push(term.clone());
            continue;
        }
        if term.arity() != 3 {
            return Err(StoqError::Precondition(format!(
                "triple-X input must be 3-local, found arity {}",
                term.arity()
            )));
        }
        let m = term.matrix.map(|v| v.re);
        for a in 0..8usize {
            if m[(a, a)] != 0.0 {
                return Err(StoqError::Precondition(
                    "triple-X input has a diagonal 3-local part; normalize first".into(),
                ));
            }
            for b in 0..a {
                let v = m[(a, b)];
                if v == 0.0 {
                    continue;
                }
                if a ^ b != 0b111 {
                    return Err(StoqError::Precondition(
                        "triple-X input has a non-normal 3-local product; normalize first"
                            .into(),
                    ));
                }
                let mut raising = [false; 3];
                for (l, r) in raising.iter_mut().enumerate() {
                    *r = (a >> l) & 1 == 1;
                }
                triples.push(Triple {
                    support: term.support.clone(),
                    raising,
                    g: -v / 3.0,
                });
            }
        }
    }
    Ok((bystanders, triples))
}

/// Mediator-only Hamiltonian terms for one triple on mediators
/// `(m1, m2, m3)`; the `XXX` interaction is emitted as a separate pure
/// term so the output's only 3-local terms are `-h XXX`.
fn mediator_terms(
    meds: &[usize; 3],
    s: &TripleXScaling,
) -> Result<Vec<LocalTerm>, StoqError> {
    let mut terms = Vec::new();
    let xxx = kron(&kron(&pauli_x(), &pauli_x()), &pauli_x());
    terms.push(LocalTerm::from_real(
        meds.to_vec(),
        -(s.delta_x / 2.0) * xxx,
    )?);
    // + (delta_x/2) I as a 1-local diagonal
    terms.push(LocalTerm::from_real(
        vec![meds[0]],
        (s.delta_x / 2.0) * DMatrix::identity(2, 2),
    )?);
    let zz = kron(&pauli_z(), &pauli_z());
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        terms.push(LocalTerm::from_real(
            vec![meds[i], meds[j]],
            -(s.delta_z / 4.0) * &zz,
        )?);
    }
    terms.push(LocalTerm::from_real(
        vec![meds[0]],
        (3.0 * s.delta_z / 4.0) * DMatrix::identity(2, 2),
    )?);
    Ok(terms)
}

/// Hop terms `-omega (B_j (x) raise_j + h.c.)` for one triple.
fn hop_terms(
    triple: &Triple,
    meds: &[usize; 3],
    omega: f64,
) -> Result<Vec<LocalTerm>, StoqError> {
    let b_scale = triple.g.powf(1.0 / 3.0);
    let mut terms = Vec::new();
    for l in 0..3 {
        let b = if triple.raising[l] {
            sigma_plus()
        } else {
            sigma_minus()
        };
        let hop = kron(&(b_scale * &b), &sigma_plus())
            + kron(&(b_scale * b.transpose()), &sigma_minus());
        terms.push(LocalTerm::from_real(
            vec![triple.support[l], meds[l]],
            -omega * hop,
        )?);
    }
    Ok(terms)
}

/// Scalar second-order shift for one triple.
fn triple_shift(triple: &Triple, s: &TripleXScaling) -> f64 {
    let b2 = triple.g.powf(2.0 / 3.0);
    -(s.omega * s.omega / 4.0) * 3.0 * b2 * (1.0 / s.delta_z + 1.0 / (s.delta_z + s.delta_x))
}

/// Compile a normal-form Hamiltonian into a triple-X Hamiltonian.
/// Mediator triples are disjoint, one per raising/lowering triple.
pub fn triple_x_reduce(h: &LocalHamiltonian, delta: f64) -> Result<GadgetResult, StoqError> {
    let scaling = TripleXScaling::new(delta)?;
    let (bystanders, triples) = parse_normal_form(h)?;
    let mut terms: Vec<LocalTerm> = bystanders;
    let mut map = Vec::new();
    let mut omega_shift = 0.0;
    let mut next = h.n();
    for triple in &triples {
        let meds = [next, next + 1, next + 2];
        next += 3;
        terms.extend(mediator_terms(&meds, &scaling)?);
        terms.extend(hop_terms(triple, &meds, scaling.omega)?);
        omega_shift += triple_shift(triple, &scaling);
        map.push(MediatorAssignment {
            mediators: meds.to_vec(),
            target_support: triple.support.clone(),
        });
    }
    let k = terms.iter().map(|t| t.arity()).max().unwrap_or(1).max(h.k());
    let compiled = LocalHamiltonian::new(next, k, terms)?;
    let mut result = GadgetResult {
        compiled,
        omega_shift,
        mediator_map: map,
        verified_error: None,
    };
    result.try_verify(h);
    Ok(result)
}

/// True when every 3-local term of `h` is a pure `-g XXX` with `g >= 0`
/// (the triple-X normal form).
pub fn is_triple_x(h: &LocalHamiltonian) -> bool {
    h.terms().iter().all(|t| {
        if t.arity() < 3 {
            return true;
        }
        if t.arity() > 3 {
            return false;
        }
        let m = t.matrix.map(|v| v.re);
        let g = -m[(0, 7)];
        if g < 0.0 {
            return false;
        }
        for a in 0..8usize {
            for b in 0..8usize {
                let expect = if a ^ b == 0b111 { -g } else { 0.0 };
                if (m[(a, b)] - expect).abs() > 1e-12 {
                    return false;
                }
            }
        }
        true
    })
}
