//! k-local qubit Hamiltonians stored as lists of small dense terms.
//!
//! `H = sum_S H_S` where each `H_S` is a Hermitian matrix on a few qubits.
//! Terms are kept as dense `2^j x 2^j` complex matrices rather than Pauli
//! decompositions: the gadget compiler emits projectors and raising/lowering
//! operators, and dense small matrices are the common denominator.
//!
//! A Hamiltonian is *stoquastic* when every off-diagonal element of the
//! full matrix `<x|H|y>` is real and non-positive, and *termwise
//! stoquastic* when each `H_S` has that property on its own support.

use crate::bits::{sub_index, with_sub_index};
use crate::error::StoqError;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Tolerance for Hermiticity and stoquasticity checks.
pub const TOL: f64 = 1e-12;

/// Hard cap on full-matrix scans and dense materialization.
pub const DENSE_CAP: usize = 14;

/// One Hermitian interaction on a sorted set of qubits.
///
/// The matrix is indexed by sub-states of the support: bit `j` of a
/// row/column index is qubit `support[j]`.
#[derive(Debug, Clone)]
pub struct LocalTerm {
    pub support: Vec<usize>,
    pub matrix: DMatrix<Complex64>,
}

impl LocalTerm {
    /// Build a term, validating support ordering and Hermiticity (1e-12).
    pub fn new(support: Vec<usize>, matrix: DMatrix<Complex64>) -> Result<Self, StoqError> {
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(StoqError::BadSupport { support });
        }
        let dim = 1usize << support.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(StoqError::BadInput(format!(
                "term on {:?} needs a {dim}x{dim} matrix, got {}x{}",
                support,
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let mut max_dev = 0.0f64;
        for a in 0..dim {
            for b in 0..dim {
                let dev = (matrix[(a, b)] - matrix[(b, a)].conj()).norm();
                max_dev = max_dev.max(dev);
            }
        }
        if max_dev > TOL {
            return Err(StoqError::NotHermitian { support, max_dev });
        }
        Ok(Self { support, matrix })
    }

    /// Build a term from a real matrix.
    pub fn from_real(support: Vec<usize>, matrix: DMatrix<f64>) -> Result<Self, StoqError> {
        Self::new(support, matrix.map(|v| Complex64::new(v, 0.0)))
    }

    /// Number of qubits the term acts on.
    pub fn arity(&self) -> usize {
        self.support.len()
    }

    /// Spectral norm, by dense eigensolve of the small matrix.
    pub fn spectral_norm(&self) -> f64 {
        crate::dense::hermitian_eigenvalues(&self.matrix)
            .iter()
            .fold(0.0f64, |m, &e| m.max(e.abs()))
    }

    /// True when all off-diagonal entries are real and `<= TOL`.
    pub fn is_stoquastic(&self) -> bool {
        let dim = self.matrix.nrows();
        for a in 0..dim {
            for b in 0..dim {
                if a == b {
                    continue;
                }
                let v = self.matrix[(a, b)];
                if v.re > TOL || v.im.abs() > TOL {
                    return false;
                }
            }
        }
        true
    }
}

/// A sum of k-local terms on `n` qubits.
///
/// `norm_bound()` returns `C = sum_S ||H_S||`, an efficiently computable
/// upper bound on `||H||`. Duplicate supports are allowed and never merged.
#[derive(Debug, Clone)]
pub struct LocalHamiltonian {
    n: usize,
    k: usize,
    terms: Vec<LocalTerm>,
}

impl LocalHamiltonian {
    /// Build a Hamiltonian, validating every term against `n` and `k`.
    pub fn new(n: usize, k: usize, terms: Vec<LocalTerm>) -> Result<Self, StoqError> {
        for t in &terms {
            if t.arity() > k {
                return Err(StoqError::LocalityExceeded {
                    support: t.support.clone(),
                    k,
                });
            }
            if let Some(&q) = t.support.iter().find(|&&q| q >= n) {
                return Err(StoqError::QubitOutOfRange { index: q, n });
            }
        }
        Ok(Self { n, k, terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &[LocalTerm] {
        &self.terms
    }

    pub fn dim(&self) -> usize {
        1usize << self.n
    }

    /// `C = sum_S ||H_S||` (spectral norms of the term matrices).
    pub fn norm_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.spectral_norm()).sum()
    }

    /// `max_S ||H_S||`, the per-term norm bound entering the walk scale.
    pub fn max_term_norm(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.spectral_norm())
            .fold(0.0f64, f64::max)
    }

    /// Matrix element `<x|H|y>` without materializing the full matrix.
    ///
    /// A term contributes `<x_S|H_S|y_S>` when `x` and `y` agree outside
    /// its support, and 0 otherwise.
    pub fn matrix_element(&self, x: u64, y: u64) -> Result<Complex64, StoqError> {
        let mask: u64 = if self.n == 64 { !0 } else { (1u64 << self.n) - 1 };
        if x & !mask != 0 || y & !mask != 0 {
            return Err(StoqError::DimensionMismatch {
                expected: self.n,
                got: 64 - (x | y).leading_zeros() as usize,
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        let diff = x ^ y;
        for t in &self.terms {
            let mut smask = 0u64;
            for &q in &t.support {
                smask |= 1u64 << q;
            }
            if diff & !smask != 0 {
                continue; // x and y disagree outside the support
            }
            let a = sub_index(x, &t.support);
            let b = sub_index(y, &t.support);
            acc += t.matrix[(a, b)];
        }
        Ok(acc)
    }

    /// Sparse row of `H`: all `(y, <x|H|y>)` with a potentially non-zero
    /// element, sorted by `y`. Zero accumulations are kept so that row sums
    /// reproduce the brute-force sum bit for bit.
    pub fn row(&self, x: u64) -> Vec<(u64, Complex64)> {
        let mut map: BTreeMap<u64, Complex64> = BTreeMap::new();
        for t in &self.terms {
            let a = sub_index(x, &t.support);
            for b in 0..t.matrix.ncols() {
                let y = with_sub_index(x, &t.support, b);
                *map.entry(y).or_insert(Complex64::new(0.0, 0.0)) += t.matrix[(a, b)];
            }
        }
        map.into_iter().collect()
    }

    /// Conjugate by `Z` on every qubit where `coloring` is true.
    ///
    /// Entry `(a, b)` of each term picks up the sign
    /// `(-1)^{popcount((a XOR b) & colored)}`; the spectrum is unchanged.
    /// For a bipartite antiferromagnet with a proper two-coloring this
    /// flips the sign of the XX and YY couplings and makes `H` stoquastic.
    pub fn bipartite_basis_change(&self, coloring: &[bool]) -> Result<LocalHamiltonian, StoqError> {
        if coloring.len() != self.n {
            return Err(StoqError::DimensionMismatch {
                expected: self.n,
                got: coloring.len(),
            });
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut cmask = 0usize;
                for (j, &q) in t.support.iter().enumerate() {
                    if coloring[q] {
                        cmask |= 1 << j;
                    }
                }
                let dim = t.matrix.nrows();
                let mut m = t.matrix.clone();
                for a in 0..dim {
                    for b in 0..dim {
                        if ((a ^ b) & cmask).count_ones() % 2 == 1 {
                            m[(a, b)] = -m[(a, b)];
                        }
                    }
                }
                LocalTerm {
                    support: t.support.clone(),
                    matrix: m,
                }
            })
            .collect();
        Ok(LocalHamiltonian {
            n: self.n,
            k: self.k,
            terms,
        })
    }

    /// Stoquasticity report.
    ///
    /// With `termwise = true` only the `2^j x 2^j` term matrices are
    /// scanned. Termwise stoquasticity implies stoquasticity (a sum of
    /// non-positive off-diagonals stays non-positive), so `is_stoquastic`
    /// is set from the termwise result when it holds; when it fails and
    /// `n <= DENSE_CAP` a full scan decides `is_stoquastic`, otherwise the
    /// flag is conservatively false.
    ///
    /// With `termwise = false` the full matrix is scanned (requires
    /// `n <= DENSE_CAP`); the termwise flag is computed as well since it
    /// is cheap.
    pub fn check_stoquastic(&self, termwise: bool) -> Result<StoquasticReport, StoqError> {
        let termwise_ok = self.terms.iter().all(|t| t.is_stoquastic());
        let termwise_violations = if termwise_ok {
            Vec::new()
        } else {
            self.termwise_violations()
        };

        if termwise {
            if termwise_ok {
                return Ok(StoquasticReport {
                    is_stoquastic: true,
                    is_termwise_stoquastic: true,
                    violations: Vec::new(),
                });
            }
            // Termwise failure does not settle the global question; scan
            // when that is affordable.
            if self.n <= DENSE_CAP {
                let global = self.full_scan_violations();
                return Ok(StoquasticReport {
                    is_stoquastic: global.is_empty(),
                    is_termwise_stoquastic: false,
                    violations: if global.is_empty() {
                        termwise_violations
                    } else {
                        global
                    },
                });
            }
            return Ok(StoquasticReport {
                is_stoquastic: false,
                is_termwise_stoquastic: false,
                violations: termwise_violations,
            });
        }

        if self.n > DENSE_CAP {
            return Err(StoqError::CapacityExceeded {
                n: self.n,
                cap: DENSE_CAP,
            });
        }
        let global = self.full_scan_violations();
        Ok(StoquasticReport {
            is_stoquastic: global.is_empty(),
            is_termwise_stoquastic: termwise_ok,
            violations: global,
        })
    }

    /// Violations of individual terms, embedded with all other qubits at 0.
    fn termwise_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for t in &self.terms {
            let dim = t.matrix.nrows();
            for a in 0..dim {
                for b in 0..dim {
                    if a == b {
                        continue;
                    }
                    let v = t.matrix[(a, b)];
                    if v.re > TOL || v.im.abs() > TOL {
                        out.push(Violation {
                            x: with_sub_index(0, &t.support, a),
                            y: with_sub_index(0, &t.support, b),
                            re: v.re,
                            im: v.im,
                        });
                    }
                }
            }
        }
        out
    }

    /// Off-diagonal violations of the summed matrix, found by enumerating
    /// the sparse rows (never materializes the `2^n x 2^n` matrix).
    fn full_scan_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for x in 0..(1u64 << self.n) {
            for (y, v) in self.row(x) {
                if y == x {
                    continue;
                }
                if v.re > TOL || v.im.abs() > TOL {
                    out.push(Violation {
                        x,
                        y,
                        re: v.re,
                        im: v.im,
                    });
                }
            }
        }
        out
    }
}

/// One off-diagonal entry that breaks stoquasticity.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Violation {
    pub x: u64,
    pub y: u64,
    pub re: f64,
    pub im: f64,
}

/// Result of a stoquasticity check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StoquasticReport {
    pub is_stoquastic: bool,
    pub is_termwise_stoquastic: bool,
    pub violations: Vec<Violation>,
}

// ---------------------------------------------------------------------------
// JSON file format
// ---------------------------------------------------------------------------

/// Serialized form: `{n, k, terms: [{support, matrix_re, matrix_im}]}`.
/// Round-trips binary64 values exactly.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianJson {
    pub n: usize,
    pub k: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub support: Vec<usize>,
    pub matrix_re: Vec<Vec<f64>>,
    pub matrix_im: Vec<Vec<f64>>,
}

impl From<&LocalHamiltonian> for HamiltonianJson {
    fn from(h: &LocalHamiltonian) -> Self {
        let terms = h
            .terms
            .iter()
            .map(|t| {
                let dim = t.matrix.nrows();
                let mut re = vec![vec![0.0; dim]; dim];
                let mut im = vec![vec![0.0; dim]; dim];
                for a in 0..dim {
                    for b in 0..dim {
                        re[a][b] = t.matrix[(a, b)].re;
                        im[a][b] = t.matrix[(a, b)].im;
                    }
                }
                TermJson {
                    support: t.support.clone(),
                    matrix_re: re,
                    matrix_im: im,
                }
            })
            .collect();
        HamiltonianJson {
            n: h.n,
            k: h.k,
            terms,
        }
    }
}

impl TryFrom<HamiltonianJson> for LocalHamiltonian {
    type Error = StoqError;

    fn try_from(j: HamiltonianJson) -> Result<Self, StoqError> {
        let terms = j
            .terms
            .into_iter()
            .map(|t| {
                let dim = 1usize << t.support.len();
                if t.matrix_re.len() != dim || t.matrix_im.len() != dim {
                    return Err(StoqError::BadInput(format!(
                        "term on {:?}: matrix rows {} != {}",
                        t.support,
                        t.matrix_re.len(),
                        dim
                    )));
                }
                let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
                for a in 0..dim {
                    if t.matrix_re[a].len() != dim || t.matrix_im[a].len() != dim {
                        return Err(StoqError::BadInput(format!(
                            "term on {:?}: ragged matrix row {a}",
                            t.support
                        )));
                    }
                    for b in 0..dim {
                        m[(a, b)] = Complex64::new(t.matrix_re[a][b], t.matrix_im[a][b]);
                    }
                }
                LocalTerm::new(t.support, m)
            })
            .collect::<Result<Vec<_>, _>>()?;
        LocalHamiltonian::new(j.n, j.k, terms)
    }
}

impl LocalHamiltonian {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&HamiltonianJson::from(self)).expect("serialization")
    }

    pub fn from_json_str(s: &str) -> Result<Self, StoqError> {
        let j: HamiltonianJson =
            serde_json::from_str(s).map_err(|e| StoqError::BadInput(e.to_string()))?;
        LocalHamiltonian::try_from(j)
    }
}
