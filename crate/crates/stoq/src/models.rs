//! Standard spin-model generators used as test instances.

use crate::dense::{kron, pauli_x, pauli_y, pauli_z};
use crate::error::StoqError;
use crate::ham::{LocalHamiltonian, LocalTerm};
use crate::rng::StreamRng;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Transverse-field Ising chain with open boundaries:
/// `H = -h sum_i X_i - j sum_i Z_i Z_{i+1}`. Stoquastic for `h >= 0`.
pub fn transverse_ising(n: usize, j: f64, h: f64) -> Result<LocalHamiltonian, StoqError> {
    let mut terms = Vec::new();
    for i in 0..n {
        terms.push(LocalTerm::from_real(vec![i], -h * pauli_x())?);
    }
    let zz = kron(&pauli_z(), &pauli_z());
    for i in 0..n.saturating_sub(1) {
        terms.push(LocalTerm::from_real(vec![i, i + 1], -j * &zz)?);
    }
    LocalHamiltonian::new(n, 2.min(n), terms)
}

/// Antiferromagnetic Heisenberg chain `H = sum_i XX + YY + ZZ`,
/// returned un-rotated; apply [`LocalHamiltonian::bipartite_basis_change`]
/// with an alternating coloring to make it stoquastic.
pub fn heisenberg_afm_chain(n: usize) -> Result<LocalHamiltonian, StoqError> {
    let xx = kron(&pauli_x(), &pauli_x()).map(|v| Complex64::new(v, 0.0));
    let yy = crate::dense::kron_c(&pauli_y(), &pauli_y());
    let zz = kron(&pauli_z(), &pauli_z()).map(|v| Complex64::new(v, 0.0));
    let bond = xx + yy + zz;
    let mut terms = Vec::new();
    for i in 0..n.saturating_sub(1) {
        terms.push(LocalTerm::new(vec![i, i + 1], bond.clone())?);
    }
    LocalHamiltonian::new(n, 2, terms)
}

/// Ferromagnetic XY chain `H = sum_i -p XX - q YY`; termwise stoquastic
/// whenever `0 <= q <= p`.
pub fn ferro_xy(n: usize, p: f64, q: f64) -> Result<LocalHamiltonian, StoqError> {
    let xx = kron(&pauli_x(), &pauli_x()).map(|v| Complex64::new(v, 0.0));
    let yy = crate::dense::kron_c(&pauli_y(), &pauli_y());
    let bond = xx.map(|v| -p * v) + yy.map(|v| -q * v);
    let mut terms = Vec::new();
    for i in 0..n.saturating_sub(1) {
        terms.push(LocalTerm::new(vec![i, i + 1], bond.clone())?);
    }
    LocalHamiltonian::new(n, 2, terms)
}

/// Classical Ising model on an `l x l x l` cubic lattice with couplings
/// drawn uniformly from {-1, 0, +1}: `H = sum_<ij> J_ij Z_i Z_j`.
/// Diagonal in the standard basis, hence stoquastic.
pub fn ising_3d_classical(l: usize, seed: u64) -> Result<LocalHamiltonian, StoqError> {
    let n = l * l * l;
    let idx = |x: usize, y: usize, z: usize| x + l * (y + l * z);
    let zz = kron(&pauli_z(), &pauli_z());
    let mut rng = StreamRng::new(seed, &[0x6973696e67]);
    let mut terms = Vec::new();
    let mut add_bond = |a: usize, b: usize, terms: &mut Vec<LocalTerm>| -> Result<(), StoqError> {
        let coupling = (rng.uniform_below(3) as i64 - 1) as f64;
        if coupling != 0.0 {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            terms.push(LocalTerm::from_real(vec![lo, hi], coupling * &zz)?);
        }
        Ok(())
    };
    for x in 0..l {
        for y in 0..l {
            for z in 0..l {
                if x + 1 < l {
                    add_bond(idx(x, y, z), idx(x + 1, y, z), &mut terms)?;
                }
                if y + 1 < l {
                    add_bond(idx(x, y, z), idx(x, y + 1, z), &mut terms)?;
                }
                if z + 1 < l {
                    add_bond(idx(x, y, z), idx(x, y, z + 1), &mut terms)?;
                }
            }
        }
    }
    LocalHamiltonian::new(n, 2, terms)
}

/// A field of `-c_i X_i` terms plus optional `-c_ij X_i X_j` couplings and
/// a uniform diagonal shift. Every row of the full matrix sums to the same
/// value, so the ground state of the induced non-negative matrix is exactly
/// uniform. Useful for walk tests where the estimator must be unbiased at
/// any walk length.
pub fn x_field(
    n: usize,
    x_coeffs: &[f64],
    xx_coeffs: &[(usize, usize, f64)],
    shift: f64,
) -> Result<LocalHamiltonian, StoqError> {
    if x_coeffs.len() != n {
        return Err(StoqError::DimensionMismatch {
            expected: n,
            got: x_coeffs.len(),
        });
    }
    let mut terms = Vec::new();
    for (i, &c) in x_coeffs.iter().enumerate() {
        let m = -c * pauli_x() + (shift / n as f64) * DMatrix::identity(2, 2);
        terms.push(LocalTerm::from_real(vec![i], m)?);
    }
    let xx = kron(&pauli_x(), &pauli_x());
    for &(a, b, c) in xx_coeffs {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        terms.push(LocalTerm::from_real(vec![lo, hi], -c * &xx)?);
    }
    LocalHamiltonian::new(n, if xx_coeffs.is_empty() { 1 } else { 2 }, terms)
}

/// Random 2-local termwise-stoquastic instance: diagonal entries uniform in
/// [-1, 1], off-diagonal entries uniform in [-1, 0], on `bonds` random pairs.
pub fn random_stoquastic_2local(n: usize, bonds: usize, seed: u64) -> Result<LocalHamiltonian, StoqError> {
    let mut rng = StreamRng::new(seed, &[0x72616e6432]);
    let mut terms = Vec::new();
    for _ in 0..bonds {
        let a = rng.uniform_below(n as u64) as usize;
        let mut b = rng.uniform_below(n as u64) as usize;
        while b == a {
            b = rng.uniform_below(n as u64) as usize;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let mut m = DMatrix::zeros(4, 4);
        for r in 0..4 {
            m[(r, r)] = rng.next_f64() * 2.0 - 1.0;
            for c in 0..r {
                let v = -rng.next_f64();
                m[(r, c)] = v;
                m[(c, r)] = v;
            }
        }
        terms.push(LocalTerm::from_real(vec![lo, hi], m)?);
    }
    LocalHamiltonian::new(n, 2, terms)
}

/// Named-model dispatcher backing the CLI.
pub fn model_builder(name: &str, params: &ModelParams) -> Result<LocalHamiltonian, StoqError> {
    match name {
        "transverse_ising" => transverse_ising(params.n, params.j, params.h),
        "heisenberg_afm" => heisenberg_afm_chain(params.n),
        "ferro_xy" => ferro_xy(params.n, params.p, params.q),
        "ising_3d_classical" => ising_3d_classical(params.l, params.seed),
        other => Err(StoqError::UnknownModel(other.to_string())),
    }
}

/// Parameters accepted by [`model_builder`]; unused fields are ignored by
/// models that do not need them.
#[derive(Debug, Clone)]
pub struct ModelParams {
    pub n: usize,
    pub l: usize,
    pub j: f64,
    pub h: f64,
    pub p: f64,
    pub q: f64,
    pub seed: u64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            n: 2,
            l: 2,
            j: 1.0,
            h: 1.0,
            p: 1.0,
            q: 1.0,
            seed: 0,
        }
    }
}
