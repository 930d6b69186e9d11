//! The Kempe-Kitaev-Regev three-qubit gadget: triple-X to 2-local.
//!
//! For a target `H_else - 6 B1 B2 B3` with `B_j = b_j X_j`, `b_j >= 0`,
//! drop the transverse mediator term of the triple-X gadget
//! (`delta_x = 0`) so the mediator ground space is spanned by `|000>` and
//! `|111>`, and couple with
//!
//!   V = -omega sum_j B_j (x) X_mj + H_else,
//!   omega = delta^-2,  delta_z = delta^-3.
//!
//! Every emitted term is 2-local. The effective low-energy Hamiltonian is
//! `Omega I + H_else (x) I - 6 B1 B2 B3 (x) X_m` on the two-dimensional
//! mediator ground space, with `Omega = -delta^-1 (b1^2 + b2^2 + b3^2)`;
//! symmetrizing the non-negative ground vector over the logical `X_m`
//! shows the ground energy equals that of the target.

use super::{GadgetResult, KkrScaling, MediatorAssignment};
use crate::dense::{kron, pauli_x, pauli_z};
use crate::error::StoqError;
use crate::ham::{LocalHamiltonian, LocalTerm};
use nalgebra::DMatrix;

/// A `-g X X X` interaction extracted from a triple-X Hamiltonian.
#[derive(Debug, Clone)]
struct XTriple {
    support: Vec<usize>,
    g: f64,
}

fn parse_triple_x(h: &LocalHamiltonian) -> Result<(Vec<LocalTerm>, Vec<XTriple>), StoqError> {
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
                "triple-X form required, found arity {}",
                term.arity()
            )));
        }
        let m = term.matrix.map(|v| v.re);
        let g = -m[(0, 7)];
        if g < 0.0 {
            return Err(StoqError::Precondition(
                "three-qubit X interaction must have non-negative strength".into(),
            ));
        }
        for a in 0..8usize {
            for b in 0..8usize {
                let expect = if a ^ b == 0b111 { -g } else { 0.0 };
                if (m[(a, b)] - expect).abs() > 1e-12 {
                    return Err(StoqError::Precondition(
                        "3-local term is not proportional to X (x) X (x) X".into(),
                    ));
                }
            }
        }
        if g > 0.0 {
            triples.push(XTriple {
                support: term.support.clone(),
                g,
            });
        }
    }
    Ok((bystanders, triples))
}

/// Compile a triple-X Hamiltonian down to 2-local, one disjoint mediator
/// triple per `X X X` interaction.
pub fn kkr_3to2_reduce(h: &LocalHamiltonian, delta: f64) -> Result<GadgetResult, StoqError> {
    let scaling = KkrScaling::new(delta)?;
    let (bystanders, triples) = parse_triple_x(h)?;
    let mut terms: Vec<LocalTerm> = bystanders;
    let mut map = Vec::new();
    let mut omega_shift = 0.0;
    let mut next = h.n();
    let zz = kron(&pauli_z(), &pauli_z());
    let xx = kron(&pauli_x(), &pauli_x());
    for triple in &triples {
        let meds = [next, next + 1, next + 2];
        next += 3;
        // mediator core: -(delta_z/4)(Z1Z2 + Z2Z3 + Z1Z3 - 3I)
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            terms.push(LocalTerm::from_real(
                vec![meds[i], meds[j]],
                -(scaling.delta_z / 4.0) * &zz,
            )?);
        }
        terms.push(LocalTerm::from_real(
            vec![meds[0]],
            (3.0 * scaling.delta_z / 4.0) * DMatrix::identity(2, 2),
        )?);
        // hops: -omega b_j X_dj (x) X_mj with b_j = (g/6)^{1/3}
        let b = (triple.g / 6.0).powf(1.0 / 3.0);
        for l in 0..3 {
            terms.push(LocalTerm::from_real(
                vec![triple.support[l], meds[l]],
                -(scaling.omega * b) * &xx,
            )?);
        }
        // Omega = -delta^-1 (b1^2 + b2^2 + b3^2)
        omega_shift += -(1.0 / delta) * 3.0 * b * b;
        map.push(MediatorAssignment {
            mediators: meds.to_vec(),
            target_support: triple.support.clone(),
        });
    }
    let k = terms.iter().map(|t| t.arity()).max().unwrap_or(1);
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact;

    /// `-6 X1 X2 X3`, ground energy -6.
    fn xxx_target() -> LocalHamiltonian {
        let xxx = kron(&kron(&pauli_x(), &pauli_x()), &pauli_x());
        LocalHamiltonian::new(
            3,
            3,
            vec![LocalTerm::from_real(vec![0, 1, 2], -6.0 * xxx).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn target_ground_energy_is_minus_six() {
        let s = exact::diagonalize_dense(&xxx_target()).unwrap();
        assert!((s.lambda0 + 6.0).abs() < 1e-12);
    }

    #[test]
    fn compiled_is_2local_stoquastic() {
        let r = kkr_3to2_reduce(&xxx_target(), 0.1).unwrap();
        assert_eq!(r.compiled.n(), 6);
        for t in r.compiled.terms() {
            assert!(t.arity() <= 2, "term on {:?} too large", t.support);
            assert!(t.is_stoquastic());
        }
    }

    #[test]
    fn spectral_error_is_small_and_shrinks() {
        let target = xxx_target();
        let mut prev = f64::INFINITY;
        for delta in [0.3, 0.2, 0.1] {
            let r = kkr_3to2_reduce(&target, delta).unwrap();
            let err = r.verified_error.unwrap();
            assert!(err < prev, "{err} at delta {delta} (prev {prev})");
            prev = err;
        }
    }

    #[test]
    fn ground_state_symmetrization_overlap() {
        // The compiled ground vector Psi and (I (x) X_m) Psi must not be
        // anti-aligned: their overlap is non-negative, so the symmetrized
        // sum is a valid non-negative ground state.
        let r = kkr_3to2_reduce(&xxx_target(), 0.15).unwrap();
        let s = exact::diagonalize_dense(&r.compiled).unwrap();
        let v = &s.ground_vector;
        // logical X_m: flip all three mediators (qubits 3, 4, 5)
        let dim = v.len();
        let mut overlap = 0.0;
        for x in 0..dim {
            let flipped = x ^ (0b111 << 3);
            overlap += v[x] * v[flipped];
        }
        assert!(overlap >= -1e-10, "overlap {overlap}");
    }

    #[test]
    fn rejects_non_x_triples() {
        // a raising/lowering triple is not of X form
        let mut m = DMatrix::zeros(8, 8);
        m[(7, 0)] = -3.0;
        m[(0, 7)] = -3.0;
        let h = LocalHamiltonian::new(
            3,
            3,
            vec![LocalTerm::from_real(vec![0, 1, 2], m).unwrap()],
        )
        .unwrap();
        assert!(matches!(
            kkr_3to2_reduce(&h, 0.1),
            Err(StoqError::Precondition(_))
        ));
    }
}
