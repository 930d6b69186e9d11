//! Dense materialization and small operator constructors.
//!
//! Everything here is for desk-scale cross-checks: the oracles in
//! [`crate::exact`], gadget verification, and tests. The walk and counting
//! machinery never materializes `2^n x 2^n` matrices.

use crate::error::StoqError;
use crate::ham::{LocalHamiltonian, DENSE_CAP};
use nalgebra::DMatrix;
use num_complex::Complex64;

pub fn pauli_x() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_z() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

pub fn pauli_y() -> DMatrix<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    let z = Complex64::new(0.0, 0.0);
    DMatrix::from_row_slice(2, 2, &[z, -i, i, z])
}

pub fn identity2() -> DMatrix<f64> {
    DMatrix::identity(2, 2)
}

/// Raising operator |1><0|.
pub fn sigma_plus() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0])
}

/// Lowering operator |0><1|.
pub fn sigma_minus() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0])
}

/// Projector |b><b| on one qubit.
pub fn projector(b: u8) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2, 2);
    m[(b as usize, b as usize)] = 1.0;
    m
}

/// Kronecker product in the crate's bit convention: `kron(a, b)` puts `a`
/// on the *lower* bits. With sub-indices `(ia, ib)` the composite index is
/// `ia | ib << a_bits`, so for support `[q0, q1]` the term matrix of
/// `A on q0, B on q1` is `kron(A, B)`.
pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    // nalgebra's kronecker uses the opposite (big-endian) convention.
    b.kronecker(a)
}

pub fn kron_c(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    b.kronecker(a)
}

/// Build a term matrix on a sorted support from single- or multi-qubit
/// factors. `factors` assigns a block to a subset of the support (indices
/// into the *qubit labels*, which must partition the support); unassigned
/// qubits get the identity.
pub fn embed_product(
    support: &[usize],
    factors: &[(&[usize], DMatrix<f64>)],
) -> DMatrix<f64> {
    let j = support.len();
    let dim = 1usize << j;
    let pos = |q: usize| -> usize {
        support
            .iter()
            .position(|&s| s == q)
            .expect("factor qubit not in support")
    };
    let mut out = DMatrix::zeros(dim, dim);
    for a in 0..dim {
        'cols: for b in 0..dim {
            let mut val = 1.0;
            let mut covered = 0usize;
            for (qubits, block) in factors {
                let mut fa = 0usize;
                let mut fb = 0usize;
                for (bit, &q) in qubits.iter().enumerate() {
                    let p = pos(q);
                    covered |= 1 << p;
                    fa |= ((a >> p) & 1) << bit;
                    fb |= ((b >> p) & 1) << bit;
                }
                val *= block[(fa, fb)];
                if val == 0.0 {
                    continue 'cols;
                }
            }
            // identity on uncovered qubits
            if (a ^ b) & !covered != 0 {
                continue;
            }
            out[(a, b)] += val;
        }
    }
    out
}

/// Materialize the full `2^n x 2^n` complex matrix (requires `n <= DENSE_CAP`).
pub fn materialize(h: &LocalHamiltonian) -> Result<DMatrix<Complex64>, StoqError> {
    if h.n() > DENSE_CAP {
        return Err(StoqError::CapacityExceeded {
            n: h.n(),
            cap: DENSE_CAP,
        });
    }
    let dim = h.dim();
    let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for x in 0..dim as u64 {
        for (y, v) in h.row(x) {
            m[(x as usize, y as usize)] += v;
        }
    }
    Ok(m)
}

/// Materialize as a real symmetric matrix; errors if any imaginary part
/// exceeds 1e-12.
pub fn materialize_real(h: &LocalHamiltonian) -> Result<DMatrix<f64>, StoqError> {
    let m = materialize(h)?;
    let max_im = m.iter().fold(0.0f64, |acc, v| acc.max(v.im.abs()));
    if max_im > 1e-12 {
        return Err(StoqError::BadInput(format!(
            "matrix has imaginary parts up to {max_im:e}; not real-representable"
        )));
    }
    Ok(m.map(|v| v.re))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let max_im = m.iter().fold(0.0f64, |acc, v| acc.max(v.im.abs()));
    let mut evs: Vec<f64> = if max_im <= 1e-13 {
        m.map(|v| v.re)
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect()
    } else {
        m.clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect()
    };
    evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    evs
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut evs: Vec<f64> = m
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    evs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_bit_order() {
        // A on qubit 0, B on qubit 1: entry ((a0,b1),(a0',b1')).
        let m = kron(&pauli_x(), &pauli_z());
        // |00> -> X on qubit 0 flips bit 0, Z gives +1: <01|M|00> = 1
        assert_eq!(m[(0b01, 0b00)], 1.0);
        // <11|M|10> = -1 (qubit 1 is set, Z sign)
        assert_eq!(m[(0b11, 0b10)], -1.0);
    }

    #[test]
    fn embed_product_matches_kron() {
        let a = pauli_x();
        let b = projector(1);
        let via_kron = kron(&a, &b);
        let via_embed = embed_product(&[3, 5], &[(&[3], a.clone()), (&[5], b.clone())]);
        assert_eq!(via_kron, via_embed);
    }

    #[test]
    fn embed_product_multiqubit_block() {
        // A two-qubit block on (q0,q2) with identity on q1.
        let block = kron(&sigma_plus(), &sigma_minus());
        let m = embed_product(&[0, 1, 2], &[(&[0, 2], block.clone())]);
        // sub-index bits: q0 -> 0, q1 -> 1, q2 -> 2.
        // block = sigma+ on q0, sigma- on q2: |1 ? 0><0 ? 1| with q1 untouched.
        assert_eq!(m[(0b001, 0b100)], 1.0);
        assert_eq!(m[(0b011, 0b110)], 1.0);
        assert_eq!(m[(0b001, 0b110)], 0.0);
    }
}
