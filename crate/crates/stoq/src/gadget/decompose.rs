//! Splitting a termwise-stoquastic Hamiltonian into operator pairs.
//!
//! In the matrix-unit basis `E^0 = |0><0|, E^1 = |0><1|, E^2 = |1><0|,
//! E^3 = |1><1|` on each qubit, a termwise-stoquastic Hamiltonian is
//!
//!   H = Omega I + R - sum_a (C_a (x) D_a + C_a^dag (x) D_a^dag)
//!
//! where every E-product coefficient is non-negative after shifting each
//! term's diagonal by its maximum (`Omega` collects the shifts), `R` is
//! the retained non-positive diagonal part, and each pair `(C_a, D_a)`
//! splits a product's support into two disjoint halves of at most
//! `ceil(j/2)` qubits. Pairs have non-negative entries, and `C^dag C`,
//! `D D^dag` are diagonal: each factor is a single scaled matrix unit.

use crate::error::StoqError;
use crate::ham::{LocalHamiltonian, LocalTerm};
use nalgebra::DMatrix;

/// One `(C, D)` pair on disjoint supports. `C (x) D + C^dag (x) D^dag`
/// contributes `-1` times itself to the reconstruction.
#[derive(Debug, Clone)]
pub struct OperatorPair {
    pub c_support: Vec<usize>,
    pub c: DMatrix<f64>,
    pub d_support: Vec<usize>,
    pub d: DMatrix<f64>,
}

impl OperatorPair {
    pub fn c_norm(&self) -> f64 {
        matrix_norm(&self.c)
    }

    pub fn d_norm(&self) -> f64 {
        matrix_norm(&self.d)
    }
}

fn matrix_norm(m: &DMatrix<f64>) -> f64 {
    // Pairs are scaled matrix units: the norm is the single entry.
    m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Decomposition of a Hamiltonian into pairs plus diagonal data.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub pairs: Vec<OperatorPair>,
    /// Scalar shift making every decomposed term's diagonal non-positive.
    pub omega: f64,
    /// Retained diagonal terms (entries <= 0 after the shift).
    pub diagonal_remainder: Vec<LocalTerm>,
    /// Terms below the arity threshold, passed through untouched.
    pub passthrough: Vec<LocalTerm>,
}

impl Decomposition {
    /// Rebuild `Omega I + R + passthrough - sum(C (x) D + h.c.)` densely.
    pub fn reconstruct(&self, n: usize) -> Result<DMatrix<f64>, StoqError> {
        let dim = 1usize << n;
        let mut m = DMatrix::identity(dim, dim) * self.omega;
        let all: Vec<usize> = (0..n).collect();
        let add_term = |m: &mut DMatrix<f64>, support: &[usize], tm: &DMatrix<f64>, sign: f64| {
            let sub = crate::dense::embed_product(&all, &[(support, tm.clone())]);
            *m += sign * sub;
        };
        for t in self.diagonal_remainder.iter().chain(&self.passthrough) {
            add_term(&mut m, &t.support, &t.matrix.map(|v| v.re), 1.0);
        }
        for p in &self.pairs {
            let mut support: Vec<usize> = p.c_support.clone();
            support.extend(&p.d_support);
            support.sort_unstable();
            let cd = crate::dense::embed_product(
                &support,
                &[(&p.c_support, p.c.clone()), (&p.d_support, p.d.clone())],
            );
            add_term(&mut m, &support, &cd, -1.0);
            add_term(&mut m, &support, &cd.transpose(), -1.0);
        }
        Ok(m)
    }
}

/// Decompose every term of `H` (diagonal E-products are retained as the
/// diagonal remainder, never paired).
pub fn decompose_target(h: &LocalHamiltonian) -> Result<Decomposition, StoqError> {
    decompose_with_threshold(h, 0, false)
}

/// Decomposition driver.
///
/// Terms with arity `<= keep_arity` pass through. For decomposed terms,
/// off-diagonal E-products always become pairs; diagonal products become
/// pairs only when `pair_diagonal` (needed when the term's support must
/// shrink), otherwise they join the diagonal remainder.
pub fn decompose_with_threshold(
    h: &LocalHamiltonian,
    keep_arity: usize,
    pair_diagonal: bool,
) -> Result<Decomposition, StoqError> {
    let report = h.check_stoquastic(true)?;
    if !report.is_termwise_stoquastic {
        return Err(StoqError::NotTermwiseStoquastic { report });
    }

    let mut pairs = Vec::new();
    let mut omega = 0.0f64;
    let mut diagonal_remainder = Vec::new();
    let mut passthrough = Vec::new();

    for term in h.terms() {
        if term.arity() <= keep_arity {
            passthrough.push(term.clone());
            continue;
        }
        let j = term.arity();
        let dim = 1usize << j;
        let mat = term.matrix.map(|v| v.re);

        // Shift the diagonal to be non-positive.
        let max_diag = (0..dim).map(|a| mat[(a, a)]).fold(f64::NEG_INFINITY, f64::max);
        let shift = max_diag.max(0.0);
        omega += shift;

        // Split the support into halves.
        let left: Vec<usize> = term.support[..j.div_ceil(2)].to_vec();
        let right: Vec<usize> = term.support[j.div_ceil(2)..].to_vec();
        let lbits = left.len();

        let mut shifted_diag = DMatrix::zeros(dim, dim);
        let mut has_diag = false;

        for a in 0..dim {
            for b in a..dim {
                let v = if a == b { mat[(a, a)] - shift } else { mat[(a, b)] };
                if v == 0.0 {
                    continue;
                }
                // v <= 0 by stoquasticity / the shift
                let weight = -v;
                if a == b && !pair_diagonal {
                    shifted_diag[(a, a)] = v;
                    has_diag = true;
                    continue;
                }
                // h (|a><b| + |b><a|) with h = weight; diagonal entries
                // appear once, so halve their pair weight.
                let hcoef = if a == b { weight / 2.0 } else { weight };
                let sq = hcoef.sqrt();
                let (al, ar) = split_index(a, lbits);
                let (bl, br) = split_index(b, lbits);
                let mut c = DMatrix::zeros(1 << lbits, 1 << lbits);
                c[(al, bl)] = sq;
                let rbits = right.len();
                let mut d = DMatrix::zeros(1 << rbits, 1 << rbits);
                d[(ar, br)] = sq;
                pairs.push(OperatorPair {
                    c_support: left.clone(),
                    c,
                    d_support: right.clone(),
                    d,
                });
            }
        }
        if has_diag {
            diagonal_remainder.push(LocalTerm::from_real(term.support.clone(), shifted_diag)?);
        }
    }
    Ok(Decomposition {
        pairs,
        omega,
        diagonal_remainder,
        passthrough,
    })
}

/// Split a sub-index into (low `lbits` bits, rest).
#[inline]
fn split_index(idx: usize, lbits: usize) -> (usize, usize) {
    (idx & ((1 << lbits) - 1), idx >> lbits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense;
    use crate::models;
    use crate::rng::StreamRng;

    /// -(|000><111| + h.c.) on three qubits.
    fn flip3() -> LocalHamiltonian {
        let mut m = DMatrix::zeros(8, 8);
        m[(0, 7)] = -1.0;
        m[(7, 0)] = -1.0;
        LocalHamiltonian::new(3, 3, vec![LocalTerm::from_real(vec![0, 1, 2], m).unwrap()])
            .unwrap()
    }

    #[test]
    fn flip3_pair_shape() {
        let d = decompose_target(&flip3()).unwrap();
        assert_eq!(d.pairs.len(), 1);
        assert_eq!(d.omega, 0.0);
        let p = &d.pairs[0];
        assert_eq!(p.c_support, vec![0, 1]);
        assert_eq!(p.d_support, vec![2]);
        // C = |00><11| on the left half, D = |0><1| on the right.
        assert_eq!(p.c[(0, 3)], 1.0);
        assert_eq!(p.d[(0, 1)], 1.0);
        assert_eq!(p.c.iter().filter(|v| **v != 0.0).count(), 1);
        assert_eq!(p.d.iter().filter(|v| **v != 0.0).count(), 1);
    }

    #[test]
    fn diagonal_hamiltonian_empty_pairs() {
        let h = models::ising_3d_classical(2, 3).unwrap();
        let d = decompose_target(&h).unwrap();
        assert!(d.pairs.is_empty());
        // Omega makes all retained diagonals non-positive.
        for t in &d.diagonal_remainder {
            for a in 0..t.matrix.nrows() {
                assert!(t.matrix[(a, a)].re <= 1e-12);
            }
        }
        let rec = d.reconstruct(h.n()).unwrap();
        let dm = dense::materialize_real(&h).unwrap();
        assert!((rec - dm).norm() < 1e-12);
    }

    #[test]
    fn random_4local_reconstruction() {
        // A dense random stoquastic 4-qubit term must rebuild exactly.
        let mut rng = StreamRng::new(5, &[]);
        let mut m = DMatrix::zeros(16, 16);
        for a in 0..16 {
            m[(a, a)] = rng.next_f64() * 2.0 - 1.0;
            for b in 0..a {
                let v = -rng.next_f64();
                m[(a, b)] = v;
                m[(b, a)] = v;
            }
        }
        let h = LocalHamiltonian::new(
            4,
            4,
            vec![LocalTerm::from_real(vec![0, 1, 2, 3], m).unwrap()],
        )
        .unwrap();
        let d = decompose_target(&h).unwrap();
        for p in &d.pairs {
            assert!(p.c_support.len() <= 2 && p.d_support.len() <= 2);
            assert!(p.c.iter().all(|&v| v >= 0.0));
            assert!(p.d.iter().all(|&v| v >= 0.0));
            // C^dag C and D D^dag diagonal (single matrix units)
            let ctc = p.c.transpose() * &p.c;
            let ddt = &p.d * p.d.transpose();
            for a in 0..ctc.nrows() {
                for b in 0..ctc.ncols() {
                    if a != b {
                        assert_eq!(ctc[(a, b)], 0.0);
                    }
                }
            }
            for a in 0..ddt.nrows() {
                for b in 0..ddt.ncols() {
                    if a != b {
                        assert_eq!(ddt[(a, b)], 0.0);
                    }
                }
            }
        }
        let rec = d.reconstruct(4).unwrap();
        let dm = dense::materialize_real(&h).unwrap();
        assert!((rec - dm).norm() < 1e-12, "reconstruction mismatch");
    }

    #[test]
    fn rejects_non_termwise_input() {
        let h = models::heisenberg_afm_chain(2).unwrap();
        assert!(matches!(
            decompose_target(&h),
            Err(StoqError::NotTermwiseStoquastic { .. })
        ));
    }

    #[test]
    fn threshold_passthrough() {
        let h = models::transverse_ising(3, 1.0, 1.0).unwrap();
        let d = decompose_with_threshold(&h, 2, true).unwrap();
        assert!(d.pairs.is_empty());
        assert_eq!(d.passthrough.len(), h.terms().len());
    }
}
