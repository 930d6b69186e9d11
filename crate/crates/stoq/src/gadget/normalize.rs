//! Normalization of 3-local stoquastic Hamiltonians.
//!
//! Output form: a 2-local stoquastic part plus three-qubit interactions
//! `-h sigma^{a} (x) sigma^{b} (x) sigma^{c}` (raising/lowering products)
//! with `h >= 0`.
//!
//! Classify each three-qubit matrix-unit product by how many of its legs
//! are off-diagonal: 0 (fully diagonal), 1, 2, or 3 (the normal form).
//! One subdivision pass turns a product with `d < 3` off-diagonal legs
//! into products with `d + 1` off-diagonal legs (the pair `C` takes the
//! off-diagonal legs first, so the mediator hop `C (x) raise` gains one),
//! plus 2-local debris. Three passes therefore suffice.

use super::decompose::{Decomposition, OperatorPair};
use super::subdivision::{check_penalty, emit_gadget};
use super::{GadgetResult, MediatorAssignment};
use crate::error::StoqError;
use crate::ham::{LocalHamiltonian, LocalTerm};
use nalgebra::DMatrix;

/// True when a 3-local term is already in the normal form: all nonzero
/// off-diagonal entries flip every leg, and the diagonal is zero.
fn is_normal_triple(m: &DMatrix<f64>) -> bool {
    for a in 0..8 {
        for b in 0..8 {
            if m[(a, b)] != 0.0 && (a ^ b) != 0b111 {
                return false;
            }
        }
    }
    true
}

/// One normalization pass: subdivide every 3-local product with fewer
/// than three off-diagonal legs. Returns the rewritten Hamiltonian, the
/// accumulated shift, the mediator map, and whether anything changed.
fn normalize_pass(
    h: &LocalHamiltonian,
    delta_gap: f64,
) -> Result<(LocalHamiltonian, f64, Vec<MediatorAssignment>, bool), StoqError> {
    let mut pairs: Vec<OperatorPair> = Vec::new();
    let mut omega = 0.0f64;
    let mut passthrough: Vec<LocalTerm> = Vec::new();
    let diagonal_remainder: Vec<LocalTerm> = Vec::new();

    for term in h.terms() {
        if term.arity() <= 2 {
            passthrough.push(term.clone());
            continue;
        }
        if term.arity() != 3 {
            return Err(StoqError::Precondition(format!(
                "normalization expects 3-local input, found arity {}",
                term.arity()
            )));
        }
        let m = term.matrix.map(|v| v.re);
        if is_normal_triple(&m) {
            passthrough.push(term.clone());
            continue;
        }
        // Shift the diagonal to be non-positive.
        let max_diag = (0..8).map(|a| m[(a, a)]).fold(f64::NEG_INFINITY, f64::max);
        let shift = max_diag.max(0.0);
        omega += shift;

        let mut keep = DMatrix::zeros(8, 8);
        for a in 0..8usize {
            for b in a..8usize {
                let v = if a == b { m[(a, a)] - shift } else { m[(a, b)] };
                if v == 0.0 {
                    continue;
                }
                let flips = a ^ b;
                if flips == 0b111 {
                    // already normal: keep both conjugate entries
                    keep[(a, b)] = v;
                    keep[(b, a)] = v;
                    continue;
                }
                let weight = -v;
                let hcoef = if a == b { weight / 2.0 } else { weight };
                let sq = hcoef.sqrt();
                // order legs: off-diagonal first, then diagonal
                let mut legs: Vec<usize> = (0..3).collect();
                legs.sort_by_key(|&l| ((flips >> l) & 1) ^ 1);
                let (c_legs, d_leg) = (&legs[..2], legs[2]);
                // C on its two legs (sorted), D on the remaining one
                let mut c_legs_sorted = c_legs.to_vec();
                c_legs_sorted.sort_unstable();
                let mut c = DMatrix::zeros(4, 4);
                let idx = |state: usize, ls: &[usize]| -> usize {
                    ls.iter()
                        .enumerate()
                        .fold(0, |acc, (i, &l)| acc | (((state >> l) & 1) << i))
                };
                c[(idx(a, &c_legs_sorted), idx(b, &c_legs_sorted))] = sq;
                let mut d = DMatrix::zeros(2, 2);
                d[((a >> d_leg) & 1, (b >> d_leg) & 1)] = sq;
                pairs.push(OperatorPair {
                    c_support: c_legs_sorted.iter().map(|&l| term.support[l]).collect(),
                    c,
                    d_support: vec![term.support[d_leg]],
                    d,
                });
            }
        }
        if keep.iter().any(|&v| v != 0.0) {
            passthrough.push(LocalTerm::from_real(term.support.clone(), keep)?);
        }
    }

    if pairs.is_empty() {
        return Ok((h.clone(), 0.0, Vec::new(), false));
    }
    let decomposition = Decomposition {
        pairs,
        omega,
        diagonal_remainder,
        passthrough,
    };
    check_penalty(&decomposition, delta_gap)?;
    let (compiled, map) = emit_gadget(h.n(), &decomposition, delta_gap)?;
    Ok((compiled, omega, map, true))
}

/// Bring a 3-local termwise-stoquastic Hamiltonian into the normal form
/// by at most three subdivision passes. `delta` sets the per-pass
/// mediator penalty: pass `i` uses `Delta_i` large enough to dominate its
/// own perturbation by the factor `100/delta`.
pub fn normalize_3local(h: &LocalHamiltonian, delta: f64) -> Result<GadgetResult, StoqError> {
    if !(0.0 < delta && delta < 1.0) {
        return Err(StoqError::Precondition(format!(
            "delta = {delta} must lie in (0, 1)"
        )));
    }
    let report = h.check_stoquastic(true)?;
    if !report.is_termwise_stoquastic {
        return Err(StoqError::NotTermwiseStoquastic { report });
    }
    if h.terms().iter().any(|t| t.arity() > 3) {
        return Err(StoqError::Precondition(
            "normalization expects a 3-local Hamiltonian".into(),
        ));
    }

    let mut current = h.clone();
    let mut omega_total = 0.0f64;
    let mut map_total: Vec<MediatorAssignment> = Vec::new();
    for _pass in 0..3 {
        let needs_pass = current
            .terms()
            .iter()
            .any(|t| t.arity() == 3 && !is_normal_triple(&t.matrix.map(|v| v.re)));
        if !needs_pass {
            break;
        }
        let delta_gap = choose_pass_delta(&current, delta)?;
        let (next, omega, map, _changed) = normalize_pass(&current, delta_gap)?;
        current = next;
        omega_total += omega;
        map_total.extend(map);
    }

    // the result must now be in normal form
    for t in current.terms() {
        if t.arity() == 3 && !is_normal_triple(&t.matrix.map(|v| v.re)) {
            return Err(StoqError::Precondition(
                "normalization did not converge in three passes".into(),
            ));
        }
    }

    let mut result = GadgetResult {
        compiled: current,
        omega_shift: -omega_total,
        mediator_map: map_total,
        verified_error: None,
    };
    result.try_verify(h);
    Ok(result)
}

/// Pick the pass penalty: `Delta` with
/// `Delta = (100/delta) * (sqrt(Delta) s + w)` where `s` is the summed
/// pair norm and `w` the bystander norm, solved for the positive root.
fn choose_pass_delta(h: &LocalHamiltonian, delta: f64) -> Result<f64, StoqError> {
    // Rebuild the pass decomposition cheaply at Delta-independent level.
    let mut s = 0.0f64;
    let mut w = 0.0f64;
    for term in h.terms() {
        let m = term.matrix.map(|v| v.re);
        if term.arity() <= 2 || is_normal_triple(&m) {
            w += term.spectral_norm();
            continue;
        }
        let max_diag = (0..m.nrows())
            .map(|a| m[(a, a)])
            .fold(f64::NEG_INFINITY, f64::max)
            .max(0.0);
        for a in 0..m.nrows() {
            for b in a..m.nrows() {
                let v = if a == b { m[(a, a)] - max_diag } else { m[(a, b)] };
                if v == 0.0 || (a ^ b) == 0b111 {
                    continue;
                }
                let weight = if a == b { -v / 2.0 } else { -v };
                let sq = weight.sqrt();
                s += 2.0 * sq; // ||C|| + ||D||
                w += 2.0 * weight; // Q norms
            }
        }
    }
    let factor = 100.0 / delta;
    // Delta = factor (sqrt(Delta) s + w)
    let sqrt_delta = 0.5 * (factor * s + ((factor * s).powi(2) + 4.0 * factor * w).sqrt());
    Ok((sqrt_delta * sqrt_delta).max(1.0))
}
