//! Order-by-order self-energy computation for gadget verification.
//!
//! Given a split `H~ = H0 + V` with a known zero-energy subspace of `H0`,
//! the self-energy on that subspace is the series
//!
//!   Sigma(z) = V-- + V-+ G+ V+- + V-+ G+ V++ G+ V+- + ...
//!
//! with `G+(z) = P+ (z - H0)^{-1} P+`. The gadget constructions are
//! validated by comparing order 2 against the scalar shift `Omega`,
//! order 3 against the target interaction, and bounding order 4.

use crate::error::StoqError;
use nalgebra::DMatrix;

/// A dense perturbative split. `low_basis` columns must be orthonormal
/// eigenvectors of `h0` (the gadget constructions provide them exactly).
#[derive(Debug, Clone)]
pub struct PerturbationSplit {
    pub h0: DMatrix<f64>,
    pub v: DMatrix<f64>,
    pub low_basis: DMatrix<f64>,
}

/// Per-order self-energy terms on the low subspace.
#[derive(Debug, Clone)]
pub struct SelfEnergyReport {
    pub z: f64,
    /// `V--`.
    pub order1: DMatrix<f64>,
    /// `V-+ G+ V+-` (zero matrix when not requested).
    pub order2: DMatrix<f64>,
    /// `V-+ G+ V++ G+ V+-` (zero matrix when not requested).
    pub order3: DMatrix<f64>,
    /// Norm of the fourth-order term (0 when not requested).
    pub order4_norm: f64,
    /// Best scalar approximation of order 2: `tr(order2)/dim`.
    pub second_order_shift: f64,
}

/// Spectral norm of a symmetric matrix.
pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    // m may be slightly asymmetric from floating noise; symmetrize
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &e| acc.max(e.abs()))
}

/// Compute self-energy orders 1..=max_order (2 <= max_order <= 4) at `z`.
/// `z` must stay clear of the high-energy spectrum of `h0`.
pub fn self_energy(
    split: &PerturbationSplit,
    z: f64,
    max_order: usize,
) -> Result<SelfEnergyReport, StoqError> {
    if !(2..=4).contains(&max_order) {
        return Err(StoqError::BadInput(format!(
            "max_order = {max_order} must be 2, 3, or 4"
        )));
    }
    let dim = split.h0.nrows();
    let d_low = split.low_basis.ncols();
    if split.v.nrows() != dim || split.low_basis.nrows() != dim {
        return Err(StoqError::BadInput("split dimensions disagree".into()));
    }

    // Eigendecompose h0 and classify eigenvectors by overlap with the
    // low basis.
    let eig = split.h0.clone().symmetric_eigen();
    let b = &split.low_basis;
    let mut g_plus = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        let u = eig.eigenvectors.column(i);
        let overlap = (b.transpose() * u).norm_squared();
        if overlap > 0.5 {
            continue; // low-space eigenvector
        }
        let denom = z - eig.eigenvalues[i];
        if denom.abs() < 1e-9 {
            return Err(StoqError::ResolventSingularity {
                z,
                dist: denom.abs(),
            });
        }
        let col = DMatrix::from_column_slice(dim, 1, u.as_slice());
        g_plus += (&col * col.transpose()) / denom;
    }

    let vb = &split.v * b; // V applied to the low basis, dim x d_low
    let order1 = b.transpose() * &vb;
    let g_vb = &g_plus * &vb;
    let order2 = vb.transpose() * &g_vb;
    let order3 = if max_order >= 3 {
        vb.transpose() * &g_plus * &split.v * &g_vb
    } else {
        DMatrix::zeros(d_low, d_low)
    };
    let order4_norm = if max_order >= 4 {
        let m4 = vb.transpose() * &g_plus * &split.v * &g_plus * &split.v * &g_vb;
        operator_norm(&m4)
    } else {
        0.0
    };
    let second_order_shift = order2.trace() / d_low as f64;
    Ok(SelfEnergyReport {
        z,
        order1,
        order2,
        order3,
        order4_norm,
        second_order_shift,
    })
}

/// Build the dense split for a triple-X gadget compiled from a single
/// raising/lowering triple: `h0 = I (x) H_M`, `v = compiled - h0`, low
/// basis `{ |x> (x) (|000> + |111>)/sqrt(2) }`.
pub fn triple_x_split(
    compiled: &crate::ham::LocalHamiltonian,
    n_data: usize,
) -> Result<PerturbationSplit, StoqError> {
    if compiled.n() != n_data + 3 {
        return Err(StoqError::BadInput(
            "expected exactly one mediator triple".into(),
        ));
    }
    let full = crate::dense::materialize_real(compiled)?;
    // h0: the mediator-only terms (supports entirely above n_data)
    let h0_terms: Vec<crate::ham::LocalTerm> = compiled
        .terms()
        .iter()
        .filter(|t| t.support.iter().all(|&q| q >= n_data))
        .cloned()
        .collect();
    let h0_ham =
        crate::ham::LocalHamiltonian::new(compiled.n(), compiled.k(), h0_terms)?;
    let h0 = crate::dense::materialize_real(&h0_ham)?;
    let v = &full - &h0;

    let dim_data = 1usize << n_data;
    let dim = 1usize << compiled.n();
    let mut basis = DMatrix::zeros(dim, dim_data);
    let inv = 1.0 / 2.0f64.sqrt();
    for x in 0..dim_data {
        basis[(x, x)] = inv; // mediators |000>
        basis[(x + (0b111 << n_data), x)] = inv; // mediators |111>
    }
    Ok(PerturbationSplit {
        h0,
        v,
        low_basis: basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{kron, sigma_plus};
    use crate::gadget::triplex::triple_x_reduce;
    use crate::gadget::TripleXScaling;
    use crate::ham::{LocalHamiltonian, LocalTerm};

    fn sss_target(coef: f64) -> LocalHamiltonian {
        let mut m = DMatrix::zeros(8, 8);
        m[(7, 0)] = -coef;
        m[(0, 7)] = -coef;
        LocalHamiltonian::new(3, 3, vec![LocalTerm::from_real(vec![0, 1, 2], m).unwrap()])
            .unwrap()
    }

    #[test]
    fn shift_formula_direct_evaluation() {
        // omega = 2, delta_z = 100, delta_x = 10:
        // Omega = -(3/4) * 4 * (1/100 + 1/110) = -0.0572727...
        let omega: f64 = 2.0;
        let sum = -(3.0 / 4.0) * omega * omega * (1.0 / 100.0 + 1.0 / 110.0);
        assert!((sum - (-0.05727272727272727)).abs() < 1e-15);
    }

    #[test]
    fn second_order_matches_shift_scalar() {
        let delta = 0.2;
        let target = sss_target(3.0);
        let r = triple_x_reduce(&target, delta).unwrap();
        let split = triple_x_split(&r.compiled, 3).unwrap();
        let rep = self_energy(&split, 0.0, 2).unwrap();
        // order 2 at z = 0 equals Omega I exactly (B^2 = 0 kills the
        // off-diagonal part); allow the documented delta^4 budget.
        let s = TripleXScaling::new(delta).unwrap();
        let omega_exact =
            -(s.omega * s.omega / 4.0) * 3.0 * (1.0 / s.delta_z + 1.0 / (s.delta_z + s.delta_x));
        assert!(
            (rep.second_order_shift - omega_exact).abs() <= 10.0 * delta.powi(4),
            "shift {} vs {}",
            rep.second_order_shift,
            omega_exact
        );
        let dev = operator_norm(
            &(&rep.order2 - DMatrix::identity(8, 8) * rep.second_order_shift),
        );
        assert!(dev <= 10.0 * delta.powi(4), "order2 deviation {dev}");
    }

    #[test]
    fn raising_squared_vanishes() {
        // B = raise: B^2 = 0, so the off-diagonal component of order 2 is
        // exactly zero even at z != 0.
        let target = sss_target(3.0);
        let r = triple_x_reduce(&target, 0.2).unwrap();
        let split = triple_x_split(&r.compiled, 3).unwrap();
        let rep = self_energy(&split, 0.5, 2).unwrap();
        for a in 0..8 {
            for b in 0..8 {
                if a != b {
                    assert!(
                        rep.order2[(a, b)].abs() < 1e-9,
                        "off-diagonal order-2 entry ({a},{b}) = {}",
                        rep.order2[(a, b)]
                    );
                }
            }
        }
    }

    #[test]
    fn third_order_reproduces_target() {
        let delta = 0.15;
        let target = sss_target(3.0);
        let r = triple_x_reduce(&target, delta).unwrap();
        let split = triple_x_split(&r.compiled, 3).unwrap();
        let rep = self_energy(&split, 0.0, 3).unwrap();
        let sss = kron(&kron(&sigma_plus(), &sigma_plus()), &sigma_plus());
        let expected = -3.0 * (&sss + sss.transpose());
        let dev = operator_norm(&(&rep.order3 - &expected));
        assert!(dev <= 3.0 * delta, "order-3 deviation {dev}");
    }

    #[test]
    fn fourth_order_is_suppressed() {
        let delta = 0.15;
        let target = sss_target(3.0);
        let r = triple_x_reduce(&target, delta).unwrap();
        let split = triple_x_split(&r.compiled, 3).unwrap();
        let rep = self_energy(&split, 0.0, 4).unwrap();
        let order3_norm = operator_norm(&rep.order3);
        assert!(
            rep.order4_norm <= order3_norm * delta / 0.5,
            "order4 {} vs order3 {}",
            rep.order4_norm,
            order3_norm
        );
    }

    #[test]
    fn singular_z_rejected() {
        let target = sss_target(3.0);
        let r = triple_x_reduce(&target, 0.2).unwrap();
        let split = triple_x_split(&r.compiled, 3).unwrap();
        let s = TripleXScaling::new(0.2).unwrap();
        assert!(matches!(
            self_energy(&split, s.delta_z, 2),
            Err(StoqError::ResolventSingularity { .. })
        ));
    }

    #[test]
    fn subdivision_split_second_order() {
        // For the arity-halving gadget the second order reproduces
        // -(C (x) D + h.c.) - Q; combined with V-- = Q + remainder the
        // sum through order 2 is the shifted target.
        let target = crate::gadget::subdivision::flip_all_target(3);
        let result = crate::gadget::subdivision_reduce(&target, 1e4).unwrap();
        let n_data = 3;
        let full = crate::dense::materialize_real(&result.compiled).unwrap();
        let h0_terms: Vec<LocalTerm> = result
            .compiled
            .terms()
            .iter()
            .filter(|t| t.support.iter().all(|&q| q >= n_data))
            .cloned()
            .collect();
        let h0 = crate::dense::materialize_real(
            &LocalHamiltonian::new(result.compiled.n(), result.compiled.k(), h0_terms)
                .unwrap(),
        )
        .unwrap();
        let v = &full - &h0;
        let dim_data = 1usize << n_data;
        let dim = full.nrows();
        let mut basis = DMatrix::zeros(dim, dim_data);
        for x in 0..dim_data {
            basis[(x, x)] = 1.0; // mediator |0>
        }
        let split = PerturbationSplit {
            h0,
            v,
            low_basis: basis,
        };
        let rep = self_energy(&split, 0.0, 2).unwrap();
        let effective = &rep.order1 + &rep.order2;
        let target_dense = crate::dense::materialize_real(&target).unwrap();
        let dev = operator_norm(&(&effective - &target_dense));
        assert!(dev < 0.05, "second-order effective deviates by {dev}");
    }
}
