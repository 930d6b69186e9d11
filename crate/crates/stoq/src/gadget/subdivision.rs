//! The subdivision gadget: halve interaction arity with one mediator
//! qubit per operator pair.
//!
//! For a target written as `Omega I + R - sum_a (C_a (x) D_a + h.c.)` the
//! gadget Hamiltonian on data + mediator qubits is
//!
//!   H~ = Delta sum_a |1><1|_a
//!        - sqrt(Delta) sum_a [(C_a + D_a^dag) (x) raise_a + h.c.]
//!        + Q + R + passthrough,     Q = sum_a (C_a^dag C_a + D_a D_a^dag)
//!
//! whose low sector (all mediators 0) reproduces the target minus
//! `Omega I` up to `O(Delta^{-1/2})`: the second-order virtual hop
//! generates `-(C (x) D + h.c.) - Q` and the explicit `Q` cancels.
//! Every emitted term is stoquastic and acts on at most
//! `ceil(j/2) + 1` qubits.

use super::decompose::{decompose_with_threshold, Decomposition};
use super::{GadgetResult, MediatorAssignment};
use crate::dense::{kron, projector, sigma_minus, sigma_plus};
use crate::error::StoqError;
use crate::ham::{LocalHamiltonian, LocalTerm};
use nalgebra::DMatrix;

/// Emit the gadget terms for a decomposition, appending one mediator per
/// pair starting at qubit index `n`. Returns the compiled Hamiltonian and
/// the mediator map.
pub(crate) fn emit_gadget(
    n: usize,
    decomposition: &Decomposition,
    delta_gap: f64,
) -> Result<(LocalHamiltonian, Vec<MediatorAssignment>), StoqError> {
    let mut terms: Vec<LocalTerm> = Vec::new();
    let mut map = Vec::new();
    let n_total = n + decomposition.pairs.len();

    for t in decomposition
        .passthrough
        .iter()
        .chain(&decomposition.diagonal_remainder)
    {
        terms.push(t.clone());
    }

    let sqrt_delta = delta_gap.sqrt();
    for (a, pair) in decomposition.pairs.iter().enumerate() {
        let med = n + a;
        // Delta |1><1| on the mediator
        terms.push(LocalTerm::from_real(vec![med], delta_gap * projector(1))?)
        ;
        // -sqrt(Delta) (C (x) raise + C^dag (x) lower); mediator index is
        // always the largest, so it takes the high sub-index bit.
        let hop_c =
            kron(&pair.c, &sigma_plus()) + kron(&pair.c.transpose(), &sigma_minus());
        let mut sup_c = pair.c_support.clone();
        sup_c.push(med);
        terms.push(LocalTerm::from_real(sup_c, -sqrt_delta * hop_c)?);
        // -sqrt(Delta) (D^dag (x) raise + D (x) lower)
        let hop_d =
            kron(&pair.d.transpose(), &sigma_plus()) + kron(&pair.d, &sigma_minus());
        let mut sup_d = pair.d_support.clone();
        sup_d.push(med);
        terms.push(LocalTerm::from_real(sup_d, -sqrt_delta * hop_d)?);
        // Q = C^dag C + D D^dag (diagonal, positive)
        terms.push(LocalTerm::from_real(
            pair.c_support.clone(),
            pair.c.transpose() * &pair.c,
        )?);
        terms.push(LocalTerm::from_real(
            pair.d_support.clone(),
            &pair.d * pair.d.transpose(),
        )?);

        let mut target_support = pair.c_support.clone();
        target_support.extend(&pair.d_support);
        map.push(MediatorAssignment {
            mediators: vec![med],
            target_support,
        });
    }

    let k = terms.iter().map(|t| t.arity()).max().unwrap_or(1);
    Ok((LocalHamiltonian::new(n_total, k, terms)?, map))
}

/// Scale of the induced interactions: `sum_a (||C_a|| ||D_a|| + ||C_a||^2
/// + ||D_a||^2)` plus bystander norms. The penalty must dominate this by
/// two orders of magnitude, and the raw perturbation (hops scale like
/// `sqrt(Delta)`) must stay inside the series convergence radius.
pub(crate) fn check_penalty(d: &Decomposition, delta_gap: f64) -> Result<(), StoqError> {
    let rest: f64 = d
        .passthrough
        .iter()
        .chain(&d.diagonal_remainder)
        .map(|t| t.spectral_norm())
        .sum();
    let induced: f64 = d
        .pairs
        .iter()
        .map(|p| p.c_norm() * p.d_norm() + p.c_norm().powi(2) + p.d_norm().powi(2))
        .sum::<f64>()
        + rest;
    if delta_gap < 100.0 * induced {
        return Err(StoqError::Precondition(format!(
            "Delta = {delta_gap} below 100 x induced interaction scale {induced:.3}"
        )));
    }
    let s: f64 = d.pairs.iter().map(|p| p.c_norm() + p.d_norm()).sum();
    let v_norm = delta_gap.sqrt() * s + induced;
    if v_norm > delta_gap / 2.0 {
        return Err(StoqError::Precondition(format!(
            "perturbation norm {v_norm:.3} exceeds Delta/2 = {};\
             the series does not converge",
            delta_gap / 2.0
        )));
    }
    Ok(())
}

/// Reduce a `k`-local termwise-stoquastic Hamiltonian to
/// `ceil(k/2)+1`-local by subdividing every term of arity above
/// `ceil(k/2)`. `delta_gap` is the mediator penalty `Delta`, which must
/// dominate the perturbation: `Delta >= 100 ||V||` (estimated).
pub fn subdivision_reduce(
    h: &LocalHamiltonian,
    delta_gap: f64,
) -> Result<GadgetResult, StoqError> {
    let keep = h.k().div_ceil(2);
    let decomposition = decompose_with_threshold(h, keep, true)?;
    check_penalty(&decomposition, delta_gap)?;
    let (compiled, map) = emit_gadget(h.n(), &decomposition, delta_gap)?;
    let mut result = GadgetResult {
        compiled,
        omega_shift: -decomposition.omega,
        mediator_map: map,
        verified_error: None,
    };
    result.try_verify(h);
    Ok(result)
}

/// `-(|0...0><1...1| + h.c.)` on `k` qubits, the canonical subdivision
/// test target.
pub fn flip_all_target(k: usize) -> LocalHamiltonian {
    let dim = 1usize << k;
    let mut m = DMatrix::zeros(dim, dim);
    m[(0, dim - 1)] = -1.0;
    m[(dim - 1, 0)] = -1.0;
    LocalHamiltonian::new(k, k, vec![LocalTerm::from_real((0..k).collect(), m).unwrap()])
        .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact;

    #[test]
    fn flip3_reduces_on_four_qubits() {
        let target = flip_all_target(3);
        let result = subdivision_reduce(&target, 1e4).unwrap();
        assert_eq!(result.compiled.n(), 4);
        assert!(result
            .compiled
            .terms()
            .iter()
            .all(|t| t.arity() <= 3 && t.is_stoquastic()));
        // lambda(target) = -1; the compiled ground energy matches within
        // the second-order error at Delta = 1e4.
        let err = result.verified_error.expect("dense verification ran");
        assert!(err <= 0.1, "verified error {err}");
    }

    #[test]
    fn error_shrinks_with_delta() {
        let target = flip_all_target(3);
        let e1 = subdivision_reduce(&target, 1e4)
            .unwrap()
            .verified_error
            .unwrap();
        let e2 = subdivision_reduce(&target, 4e4)
            .unwrap()
            .verified_error
            .unwrap();
        assert!(
            e2 < e1,
            "error must decrease with Delta: {e1} -> {e2}"
        );
    }

    #[test]
    fn flip4_locality_three() {
        let target = flip_all_target(4);
        let result = subdivision_reduce(&target, 1e4).unwrap();
        // ceil(4/2) + 1 = 3
        let max_arity = result
            .compiled
            .terms()
            .iter()
            .map(|t| t.arity())
            .max()
            .unwrap();
        assert_eq!(max_arity, 3);
        assert_eq!(result.compiled.n(), 5);
    }

    #[test]
    fn delta_too_small_rejected() {
        let target = flip_all_target(3);
        assert!(matches!(
            subdivision_reduce(&target, 10.0),
            Err(StoqError::Precondition(_))
        ));
    }

    #[test]
    fn ground_energy_tracks_target() {
        // Verify the omega bookkeeping: lambda(compiled) - omega_shift
        // approximates lambda(target) even with a diagonal part present.
        let mut m = DMatrix::zeros(8, 8);
        m[(0, 7)] = -1.0;
        m[(7, 0)] = -1.0;
        m[(2, 2)] = 0.6; // positive diagonal forces a shift
        m[(5, 5)] = -0.2;
        let target = LocalHamiltonian::new(
            3,
            3,
            vec![LocalTerm::from_real(vec![0, 1, 2], m).unwrap()],
        )
        .unwrap();
        let result = subdivision_reduce(&target, 4e4).unwrap();
        let t = exact::diagonalize_dense(&target).unwrap();
        let c = exact::diagonalize_dense(&result.compiled).unwrap();
        assert!(
            (c.lambda0 - result.omega_shift - t.lambda0).abs() < 0.05,
            "lambda mismatch: {} vs {}",
            c.lambda0 - result.omega_shift,
            t.lambda0
        );
    }
}
